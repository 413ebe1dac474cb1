#ifndef CREW_LP_HPP
#define CREW_LP_HPP

#include <string>
#include <utility>
#include <vector>

#include "crew/model.hpp"

namespace crew {

// Self-contained LP/ILP engine for the restricted master problems: bounded
// revised simplex with dense basis inverse and row duals, plus a small
// branch-and-bound for the binary finish. Minimization throughout.

constexpr double kLpInfinity = 1e30;

struct Tolerances {
  double feasibility = 1e-7;
  double optimality = 1e-7;
  double integrality = 1e-7;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
const char* lp_status_name(LpStatus s);

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower, upper;  // upper may be kLpInfinity
  struct Row {
    std::vector<std::pair<int, double>> entries;  // (column, coefficient)
    RowSense sense = RowSense::Equal;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int add_column(double c, double lo, double hi);
  int add_row(RowSense sense, double rhs);
  void set_coeff(int row, int col, double value);

  int n_cols() const { return static_cast<int>(cost.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }

  // Throws InputError on non-finite data or dangling column references.
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;      // structural columns only
  std::vector<double> duals;  // one per row, sign convention of the original row
  long iterations = 0;
};

// Deterministic pivoting: steepest violation with a Bland fallback engaged
// after a degenerate streak, so every run of the same input takes the same
// path. On Optimal the solution satisfies primal feasibility, dual
// feasibility and complementary slackness within the tolerances.
LpSolution solve_lp(const LinearProgram& lp, const Tolerances& tol = {},
                    long iteration_limit = 500000);

struct IlpResult {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  long nodes = 0;
  double bound_gap = 0.0;  // incumbent minus best outstanding bound
};

// Branch & bound over the given binary columns: most-fractional branching,
// best-bound node order. Hitting node_limit returns the incumbent with its
// bound gap and status IterationLimit.
IlpResult solve_ilp(const LinearProgram& lp, const std::vector<int>& integer_cols,
                    const Tolerances& tol = {}, long node_limit = 100000);

// Debug dump in the common LP text format.
std::string lp_to_text(const LinearProgram& lp);

}  // namespace crew

#endif  // CREW_LP_HPP
