#include "crew/lp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace crew {

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

int LinearProgram::add_column(double c, double lo, double hi) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return n_cols() - 1;
}

int LinearProgram::add_row(RowSense sense, double rhs) {
  rows.push_back({{}, sense, rhs});
  return n_rows() - 1;
}

void LinearProgram::set_coeff(int row, int col, double value) {
  rows[row].entries.emplace_back(col, value);
}

void LinearProgram::validate() const {
  if (lower.size() != cost.size() || upper.size() != cost.size())
    throw InputError("column arrays disagree in length");
  for (int j = 0; j < n_cols(); ++j) {
    if (!std::isfinite(cost[j]) || !std::isfinite(lower[j]))
      throw InputError("non-finite column data");
    if (upper[j] < lower[j]) throw InputError("empty column bound interval");
  }
  for (const Row& r : rows) {
    if (!std::isfinite(r.rhs)) throw InputError("non-finite right-hand side");
    for (auto [col, v] : r.entries) {
      if (col < 0 || col >= n_cols()) throw InputError("row references unknown column");
      if (!std::isfinite(v)) throw InputError("non-finite coefficient");
    }
  }
}

namespace {

constexpr double kPivotEps = 1e-9;
constexpr int kRefactorEvery = 100;
constexpr int kBlandAfter = 40;
// Degenerate-stall escape: after this many zero-step pivots the active costs
// of nonbasic columns get a tiny deterministic tie-breaking offset, removed
// again before the solution is reported. Engages before Bland so the common
// case (massive dual ties in set-covering masters) is resolved by tie
// breaking rather than by Bland's slow crawl.
constexpr int kPerturbAfter = 20;
constexpr double kPerturbBase = 1e-5;
constexpr double kPerturbMax = 1e-3;
constexpr int kPerturbRounds = 6;

std::uint64_t mix_column(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

enum VStat : char { kBasic, kAtLower, kAtUpper };

// Bounded-variable revised simplex over the row-normalized system
// (rhs >= 0), dense basis inverse, two phases via artificial columns.
struct Simplex {
  const LinearProgram& lp;
  const Tolerances& tol;
  long iteration_limit;

  int m = 0, n = 0, ntot = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;  // sparse, incl. aux
  std::vector<double> clo, chi, phase2_cost;
  std::vector<double> shift;   // original lower bound per structural column
  std::vector<double> rhs;
  std::vector<int> flip;       // original-row sign after normalization
  std::vector<int> artificial; // artificial column per row, -1 if none

  std::vector<int> basis;      // column basic in each row position
  std::vector<char> vstat;
  std::vector<double> xB;
  std::vector<double> Binv;    // dense m*m, row-major
  std::vector<double> cost;    // active phase cost

  long iterations = 0;
  int pivots_since_refactor = 0;
  int degenerate_streak = 0;
  bool breakdown = false;
  bool perturbed = false;
  double perturb_scale = kPerturbBase;

  Simplex(const LinearProgram& lp_, const Tolerances& tol_, long limit,
          const std::vector<double>& lo, const std::vector<double>& hi)
      : lp(lp_), tol(tol_), iteration_limit(limit) {
    m = lp.n_rows();
    n = lp.n_cols();
    cols.resize(n);
    // work in z = x - lower, so every column starts nonbasic at zero and
    // the sign normalization below sees the true initial residuals
    shift = lo;
    clo.assign(n, 0.0);
    chi.resize(n);
    for (int j = 0; j < n; ++j)
      chi[j] = hi[j] >= kLpInfinity ? kLpInfinity : hi[j] - lo[j];
    rhs.resize(m);
    flip.assign(m, 1);
    artificial.assign(m, -1);

    std::vector<RowSense> sense(m);
    for (int i = 0; i < m; ++i) {
      sense[i] = lp.rows[i].sense;
      rhs[i] = lp.rows[i].rhs;
      for (auto [col, v] : lp.rows[i].entries) rhs[i] -= v * shift[col];
      if (rhs[i] < 0) {
        rhs[i] = -rhs[i];
        flip[i] = -1;
        if (sense[i] == RowSense::LessEqual) sense[i] = RowSense::GreaterEqual;
        else if (sense[i] == RowSense::GreaterEqual) sense[i] = RowSense::LessEqual;
      }
      for (auto [col, v] : lp.rows[i].entries) cols[col].emplace_back(i, flip[i] * v);
    }

    // aux columns: slack for <= (initial basic), surplus for >=
    std::vector<int> slack(m, -1);
    for (int i = 0; i < m; ++i) {
      if (sense[i] == RowSense::LessEqual) {
        slack[i] = add_aux(i, 1.0);
      } else if (sense[i] == RowSense::GreaterEqual) {
        add_aux(i, -1.0);
      }
    }
    // artificial columns give the identity start basis where no slack does
    for (int i = 0; i < m; ++i)
      if (sense[i] != RowSense::LessEqual) artificial[i] = add_aux(i, 1.0);

    ntot = static_cast<int>(cols.size());
    phase2_cost.assign(ntot, 0.0);
    for (int j = 0; j < n; ++j) phase2_cost[j] = lp.cost[j];

    basis.assign(m, -1);
    vstat.assign(ntot, kAtLower);
    xB.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      int b = artificial[i] >= 0 ? artificial[i] : slack[i];
      basis[i] = b;
      vstat[b] = kBasic;
    }
    Binv.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) Binv[static_cast<std::size_t>(i) * m + i] = 1.0;
    compute_xB();
  }

  int add_aux(int row, double coeff) {
    cols.push_back({{row, coeff}});
    clo.push_back(0.0);
    chi.push_back(kLpInfinity);
    return static_cast<int>(cols.size()) - 1;
  }

  double nb_value(int j) const { return vstat[j] == kAtUpper ? chi[j] : clo[j]; }

  void compute_xB() {
    std::vector<double> b_eff = rhs;
    for (int j = 0; j < ntot; ++j) {
      if (vstat[j] == kBasic) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      for (auto [i, a] : cols[j]) b_eff[i] -= a * v;
    }
    for (int p = 0; p < m; ++p) {
      double s = 0.0;
      const double* row = &Binv[static_cast<std::size_t>(p) * m];
      for (int i = 0; i < m; ++i) s += row[i] * b_eff[i];
      xB[p] = s;
    }
  }

  // Rebuilds Binv from the basis by Gauss-Jordan; false on singular basis.
  bool refactor() {
    std::vector<double> M(static_cast<std::size_t>(m) * m, 0.0);
    for (int p = 0; p < m; ++p)
      for (auto [i, a] : cols[basis[p]]) M[static_cast<std::size_t>(i) * m + p] = a;
    std::vector<double>& inv = Binv;
    std::fill(inv.begin(), inv.end(), 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;
    for (int colp = 0; colp < m; ++colp) {
      int piv = -1;
      double best = 1e-11;
      for (int r = colp; r < m; ++r) {
        double v = std::fabs(M[static_cast<std::size_t>(r) * m + colp]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) return false;
      if (piv != colp) {
        for (int k = 0; k < m; ++k) {
          std::swap(M[static_cast<std::size_t>(piv) * m + k],
                    M[static_cast<std::size_t>(colp) * m + k]);
          std::swap(inv[static_cast<std::size_t>(piv) * m + k],
                    inv[static_cast<std::size_t>(colp) * m + k]);
        }
      }
      double d = M[static_cast<std::size_t>(colp) * m + colp];
      for (int k = 0; k < m; ++k) {
        M[static_cast<std::size_t>(colp) * m + k] /= d;
        inv[static_cast<std::size_t>(colp) * m + k] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == colp) continue;
        double f = M[static_cast<std::size_t>(r) * m + colp];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          M[static_cast<std::size_t>(r) * m + k] -= f * M[static_cast<std::size_t>(colp) * m + k];
          inv[static_cast<std::size_t>(r) * m + k] -=
              f * inv[static_cast<std::size_t>(colp) * m + k];
        }
      }
    }
    pivots_since_refactor = 0;
    return true;
  }

  void duals(std::vector<double>& y) const {
    y.assign(m, 0.0);
    for (int p = 0; p < m; ++p) {
      double cb = cost[basis[p]];
      if (cb == 0.0) continue;
      const double* row = &Binv[static_cast<std::size_t>(p) * m];
      for (int i = 0; i < m; ++i) y[i] += cb * row[i];
    }
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost[j];
    for (auto [i, a] : cols[j]) d -= y[i] * a;
    return d;
  }

  void ftran(int j, std::vector<double>& w) const {
    w.assign(m, 0.0);
    for (auto [i, a] : cols[j]) {
      for (int p = 0; p < m; ++p) w[p] += Binv[static_cast<std::size_t>(p) * m + i] * a;
    }
  }

  // One phase of iterations with the active `cost`. Returns status.
  LpStatus iterate() {
    std::vector<double> y, w;
    while (true) {
      if (iterations >= iteration_limit) return LpStatus::IterationLimit;

      if (!perturbed && degenerate_streak >= kPerturbAfter) {
        // break dual ties among the nonbasic columns; basic costs stay exact
        // so the duals are untouched and every offset is >= 0, which keeps
        // the perturbed problem a relaxation-consistent tie-break only
        for (int j = 0; j < ntot; ++j) {
          if (vstat[j] == kBasic) continue;
          double u = static_cast<double>(mix_column(static_cast<std::uint64_t>(j)) % 65521 + 1) /
                     65521.0;
          cost[j] += perturb_scale * (1.0 + std::fabs(cost[j])) * u;
        }
        perturbed = true;
        degenerate_streak = 0;
      }

      duals(y);

      bool bland = degenerate_streak > kBlandAfter;
      int enter = -1;
      double enter_score = tol.optimality;
      int enter_dir = 0;
      for (int j = 0; j < ntot; ++j) {
        if (vstat[j] == kBasic || clo[j] == chi[j]) continue;
        double d = reduced_cost(j, y);
        int dir = 0;
        double score = 0.0;
        if (vstat[j] == kAtLower && d < -tol.optimality) {
          dir = 1;
          score = -d;
        } else if (vstat[j] == kAtUpper && d > tol.optimality) {
          dir = -1;
          score = d;
        } else {
          continue;
        }
        if (bland) {
          enter = j;
          enter_dir = dir;
          break;
        }
        if (score > enter_score) {
          enter_score = score;
          enter = j;
          enter_dir = dir;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      ++iterations;
      ftran(enter, w);

      // ratio test: entering moves by t*dir, basic p moves by -t*dir*w[p]
      double t_max = chi[enter] >= kLpInfinity ? kLpInfinity : chi[enter] - clo[enter];
      double best_t = t_max;
      int leave = -1;       // basis position; -1 means bound flip
      char leave_to = kAtLower;
      double leave_pivot = 0.0;
      for (int p = 0; p < m; ++p) {
        double delta = -enter_dir * w[p];
        if (delta < -kPivotEps) {
          double limit = (xB[p] - clo[basis[p]]) / (-delta);
          if (limit < best_t - kPivotEps ||
              (limit < best_t + kPivotEps && pick_leaving(p, leave, w, bland))) {
            best_t = std::max(0.0, limit);
            leave = p;
            leave_to = kAtLower;
            leave_pivot = w[p];
          }
        } else if (delta > kPivotEps && chi[basis[p]] < kLpInfinity) {
          double limit = (chi[basis[p]] - xB[p]) / delta;
          if (limit < best_t - kPivotEps ||
              (limit < best_t + kPivotEps && pick_leaving(p, leave, w, bland))) {
            best_t = std::max(0.0, limit);
            leave = p;
            leave_to = kAtUpper;
            leave_pivot = w[p];
          }
        }
      }

      if (leave < 0 && t_max >= kLpInfinity) return LpStatus::Unbounded;

      if (best_t <= kPivotEps) ++degenerate_streak;
      else degenerate_streak = 0;

      if (leave < 0) {
        // bound flip, basis unchanged
        vstat[enter] = vstat[enter] == kAtLower ? kAtUpper : kAtLower;
        for (int p = 0; p < m; ++p) xB[p] -= best_t * enter_dir * w[p];
        continue;
      }

      double enter_val = nb_value(enter) + enter_dir * best_t;
      for (int p = 0; p < m; ++p) xB[p] -= best_t * enter_dir * w[p];

      int out = basis[leave];
      vstat[out] = leave_to;
      vstat[enter] = kBasic;
      basis[leave] = enter;
      xB[leave] = enter_val;

      // product-form update of Binv
      double piv = leave_pivot;
      if (std::fabs(piv) < 1e-12) {
        if (!refactor()) {
          breakdown = true;
          return LpStatus::IterationLimit;
        }
        compute_xB();
        continue;
      }
      double* rrow = &Binv[static_cast<std::size_t>(leave) * m];
      for (int k = 0; k < m; ++k) rrow[k] /= piv;
      for (int p = 0; p < m; ++p) {
        if (p == leave) continue;
        double f = w[p];
        if (f == 0.0) continue;
        double* prow = &Binv[static_cast<std::size_t>(p) * m];
        for (int k = 0; k < m; ++k) prow[k] -= f * rrow[k];
      }

      if (++pivots_since_refactor >= kRefactorEvery) {
        if (!refactor()) {
          breakdown = true;
          return LpStatus::IterationLimit;
        }
        compute_xB();
      }
    }
  }

  // Runs the active-cost phase to a true-cost optimum. If stalling forced a
  // perturbation, the offsets are removed on (perturbed) optimality and the
  // phase resumes, so the result always satisfies the original tolerances;
  // a fresh stall re-perturbs at a larger scale.
  LpStatus iterate_robust() {
    const std::vector<double> true_cost = cost;
    for (int round = 0; round < kPerturbRounds; ++round) {
      LpStatus st = iterate();
      bool was_perturbed = perturbed;
      cost = true_cost;
      perturbed = false;
      if (st != LpStatus::Optimal || !was_perturbed) return st;
      degenerate_streak = 0;
      perturb_scale = std::min(perturb_scale * 8.0, kPerturbMax);
    }
    return LpStatus::IterationLimit;
  }

  // Deterministic tie-break for the leaving row: Bland mode prefers the
  // smallest basic column id; otherwise the larger pivot magnitude, then the
  // lower position.
  bool pick_leaving(int cand, int current, const std::vector<double>& w, bool bland) const {
    if (current < 0) return true;
    if (bland) return basis[cand] < basis[current];
    double a = std::fabs(w[cand]), b = std::fabs(w[current]);
    if (a != b) return a > b;
    return cand < current;
  }

  LpSolution run() {
    LpSolution sol;

    // phase 1: drive artificials to zero
    cost.assign(ntot, 0.0);
    bool any_art = false;
    for (int i = 0; i < m; ++i)
      if (artificial[i] >= 0) {
        cost[artificial[i]] = 1.0;
        any_art = true;
      }
    if (any_art) {
      LpStatus st = iterate_robust();
      if (st == LpStatus::IterationLimit || breakdown) {
        sol.status = LpStatus::IterationLimit;
        sol.iterations = iterations;
        return sol;
      }
      double infeas = 0.0;
      for (int p = 0; p < m; ++p)
        if (cost[basis[p]] == 1.0) infeas += xB[p];
      for (int j = 0; j < ntot; ++j)
        if (cost[j] == 1.0 && vstat[j] == kAtUpper) infeas += chi[j];
      if (infeas > tol.feasibility) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations;
        return sol;
      }
      // pin artificials at zero for phase 2
      for (int i = 0; i < m; ++i)
        if (artificial[i] >= 0) chi[artificial[i]] = 0.0;
    }

    cost = phase2_cost;
    cost.resize(ntot, 0.0);
    LpStatus st = iterate_robust();
    sol.iterations = iterations;
    if (breakdown) {
      sol.status = LpStatus::IterationLimit;
      return sol;
    }
    sol.status = st;
    if (st != LpStatus::Optimal) return sol;

    sol.x.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
      if (vstat[j] != kBasic) sol.x[j] = shift[j] + nb_value(j);
    for (int p = 0; p < m; ++p)
      if (basis[p] < n) sol.x[basis[p]] = shift[basis[p]] + xB[p];
    sol.objective = 0.0;
    for (int j = 0; j < n; ++j) sol.objective += lp.cost[j] * sol.x[j];

    std::vector<double> y;
    duals(y);
    sol.duals.assign(m, 0.0);
    for (int i = 0; i < m; ++i) sol.duals[i] = flip[i] * y[i];
    return sol;
  }
};

}  // namespace

namespace detail {
LpSolution solve_lp_bounds(const LinearProgram& lp, const std::vector<double>& lo,
                           const std::vector<double>& hi, const Tolerances& tol,
                           long iteration_limit) {
  Simplex s(lp, tol, iteration_limit, lo, hi);
  return s.run();
}
}  // namespace detail

LpSolution solve_lp(const LinearProgram& lp, const Tolerances& tol, long iteration_limit) {
  lp.validate();
  return detail::solve_lp_bounds(lp, lp.lower, lp.upper, tol, iteration_limit);
}

IlpResult solve_ilp(const LinearProgram& lp, const std::vector<int>& integer_cols,
                    const Tolerances& tol, long node_limit) {
  lp.validate();
  for (int j : integer_cols) {
    if (j < 0 || j >= lp.n_cols()) throw InputError("integer column out of range");
    if (lp.lower[j] < -tol.integrality || lp.upper[j] > 1.0 + tol.integrality)
      throw InputError("integer columns must be bounded within [0,1]");
  }

  struct Node {
    double bound;
    long id;
    std::vector<std::pair<int, char>> fixes;  // (column, 0 or 1)
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  open.push({-kLpInfinity, 0, {}});

  IlpResult res;
  res.status = LpStatus::Infeasible;
  double incumbent = kLpInfinity;
  long next_id = 1;
  bool limit_hit = false;

  while (!open.empty()) {
    if (res.nodes >= node_limit) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - 1e-12 && incumbent < kLpInfinity) continue;
    ++res.nodes;

    std::vector<double> lo = lp.lower, hi = lp.upper;
    for (auto [col, val] : node.fixes) {
      lo[col] = val;
      hi[col] = val;
    }
    LpSolution rel = detail::solve_lp_bounds(lp, lo, hi, tol, 500000);
    if (rel.status == LpStatus::Infeasible) continue;
    if (rel.status != LpStatus::Optimal) {
      limit_hit = true;
      continue;
    }
    if (rel.objective >= incumbent - 1e-12 && incumbent < kLpInfinity) continue;

    int branch_col = -1;
    double branch_frac = tol.integrality;
    for (int j : integer_cols) {
      double f = rel.x[j] - std::floor(rel.x[j]);
      double dist = std::min(f, 1.0 - f);
      if (dist > branch_frac) {
        branch_frac = dist;
        branch_col = j;
      }
    }

    if (branch_col < 0) {
      // integral: recompute the value with integer columns snapped
      std::vector<double> x = rel.x;
      for (int j : integer_cols) x[j] = std::round(x[j]);
      double val = 0.0;
      for (int j = 0; j < lp.n_cols(); ++j) val += lp.cost[j] * x[j];
      if (val < incumbent - 1e-12) {
        incumbent = val;
        res.x = x;
        res.objective = val;
        res.status = LpStatus::Optimal;
      }
      continue;
    }

    for (char v : {static_cast<char>(0), static_cast<char>(1)}) {
      Node child{rel.objective, next_id++, node.fixes};
      child.fixes.emplace_back(branch_col, v);
      if (child.bound < incumbent - 1e-12 || incumbent >= kLpInfinity) open.push(child);
    }
  }

  if (limit_hit) {
    double best_bound = incumbent;
    if (!open.empty()) best_bound = std::min(best_bound, open.top().bound);
    res.bound_gap = incumbent < kLpInfinity ? incumbent - best_bound : kLpInfinity;
    res.status = LpStatus::IterationLimit;
  }
  return res;
}

std::string lp_to_text(const LinearProgram& lp) {
  std::ostringstream out;
  out << "Minimize\n obj:";
  for (int j = 0; j < lp.n_cols(); ++j)
    if (lp.cost[j] != 0.0) out << (lp.cost[j] >= 0 ? " + " : " - ") << std::fabs(lp.cost[j])
                               << " x" << j;
  out << "\nSubject To\n";
  for (int i = 0; i < lp.n_rows(); ++i) {
    const auto& r = lp.rows[i];
    out << " r" << i << ":";
    for (auto [col, v] : r.entries)
      out << (v >= 0 ? " + " : " - ") << std::fabs(v) << " x" << col;
    out << (r.sense == RowSense::LessEqual ? " <= "
            : r.sense == RowSense::Equal   ? " = "
                                           : " >= ")
        << r.rhs << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.n_cols(); ++j) {
    out << " " << lp.lower[j] << " <= x" << j;
    if (lp.upper[j] < kLpInfinity) out << " <= " << lp.upper[j];
    out << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace crew
