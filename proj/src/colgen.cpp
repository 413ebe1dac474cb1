#include "crew/colgen.hpp"

#include <algorithm>
#include <chrono>

#include "crew/feasibility.hpp"

namespace crew {

void MasterModel::add_duty_column(const DutyPool& pool, int duty_index, int driver_id,
                                  const Instance& instance) {
  double cost = column_cost(pool, duty_index, instance.driver(driver_id), instance);
  int col = lp.add_column(cost, 0.0, kLpInfinity);
  for (int tid : pool.duties[duty_index]) lp.set_coeff(task_row[tid], col, 1.0);
  lp.set_coeff(convexity_row.at(driver_id), col, 1.0);
  columns.push_back({duty_index, driver_id, -1, cost});
  present.insert({duty_index, driver_id});
}

MasterModel build_master(const Instance& instance, const std::set<int>& absent,
                         const DutyPool& pool) {
  MasterModel m;
  m.task_row.resize(instance.tasks.size());
  for (const Task& t : instance.tasks) m.task_row[t.id] = m.lp.add_row(RowSense::GreaterEqual, 1.0);
  for (const Driver& d : instance.drivers)
    if (!absent.count(d.id)) m.convexity_row[d.id] = m.lp.add_row(RowSense::Equal, 1.0);

  for (const Task& t : instance.tasks) {
    int col = m.lp.add_column(instance.weights.alpha, 0.0, kLpInfinity);
    m.lp.set_coeff(m.task_row[t.id], col, 1.0);
    m.columns.push_back({-1, -1, t.id, instance.weights.alpha});
  }
  for (const auto& [did, row] : m.convexity_row) {
    const Driver& d = instance.driver(did);
    double cost = duty_cost({}, d, instance);
    int col = m.lp.add_column(cost, 0.0, kLpInfinity);
    m.lp.set_coeff(row, col, 1.0);
    m.columns.push_back({-1, did, -1, cost});

    if (d.original_tasks.empty()) continue;
    auto it = std::lower_bound(pool.duties.begin(), pool.duties.end(), d.original_tasks);
    if (it == pool.duties.end() || *it != d.original_tasks)
      throw InputError("duty pool does not contain driver " + std::to_string(did) +
                       "'s original duty; pool and instance rules disagree");
    m.add_duty_column(pool, static_cast<int>(it - pool.duties.begin()), did, instance);
  }
  return m;
}

MasterDuals extract_duals(const MasterModel& master, const LpSolution& sol) {
  MasterDuals d;
  d.lambda.resize(master.task_row.size());
  for (std::size_t g = 0; g < master.task_row.size(); ++g)
    d.lambda[g] = sol.duals[master.task_row[g]];
  for (const auto& [did, row] : master.convexity_row) d.mu[did] = sol.duals[row];
  return d;
}

double column_cost(const DutyPool& pool, int duty_index, const Driver& driver,
                   const Instance& instance) {
  return duty_cost(pool.entries(duty_index), driver, instance);
}

double reduced_cost(const DutyPool& pool, int duty_index, const Driver& driver,
                    const MasterDuals& duals, const Instance& instance) {
  double rc = column_cost(pool, duty_index, driver, instance) - duals.mu.at(driver.id);
  for (int tid : pool.duties[duty_index]) rc -= duals.lambda[tid];
  return rc;
}

void shrink_master(MasterModel& master, const LpSolution& sol, const MasterDuals& duals,
                   const DutyPool& pool, const Instance& instance, double keep_tol) {
  MasterModel next;
  next.task_row = master.task_row;
  next.convexity_row = master.convexity_row;
  for (const auto& row : master.lp.rows) next.lp.add_row(row.sense, row.rhs);

  for (std::size_t j = 0; j < master.columns.size(); ++j) {
    const MasterColumn& col = master.columns[j];
    bool structural = col.duty_index < 0;
    bool in_support = j < sol.x.size() && sol.x[j] > 0.0;
    bool attractive = false;
    if (!structural && !in_support) {
      double rc = col.cost - duals.mu.at(col.driver_id);
      for (int tid : pool.duties[col.duty_index]) rc -= duals.lambda[tid];
      attractive = rc <= keep_tol;
    }
    if (!structural && !in_support && !attractive) continue;

    int nj = next.lp.add_column(master.lp.cost[j], master.lp.lower[j], master.lp.upper[j]);
    if (col.duty_index >= 0) {
      for (int tid : pool.duties[col.duty_index]) next.lp.set_coeff(next.task_row[tid], nj, 1.0);
      next.lp.set_coeff(next.convexity_row.at(col.driver_id), nj, 1.0);
      next.present.insert({col.duty_index, col.driver_id});
    } else if (col.shadow_task >= 0) {
      next.lp.set_coeff(next.task_row[col.shadow_task], nj, 1.0);
    } else {
      next.lp.set_coeff(next.convexity_row.at(col.driver_id), nj, 1.0);
    }
    next.columns.push_back(col);
  }
  master = std::move(next);
}

std::vector<PricedColumn> price(const DutyPool& pool, const MasterModel& master,
                                const MasterDuals& duals, int k, const Instance& instance,
                                double tol) {
  std::vector<PricedColumn> found;
  for (const auto& [did, row] : master.convexity_row) {
    auto it = pool.per_driver_index.find(did);
    if (it == pool.per_driver_index.end()) continue;
    const Driver& drv = instance.driver(did);
    double mu = duals.mu.at(did);
    for (int j : it->second) {
      if (master.present.count({j, did})) continue;
      double rc = column_cost(pool, j, drv, instance) - mu;
      for (int tid : pool.duties[j]) rc -= duals.lambda[tid];
      if (rc < -tol) found.push_back({j, did, rc});
    }
  }
  auto order = [](const PricedColumn& a, const PricedColumn& b) {
    if (a.rc != b.rc) return a.rc < b.rc;
    if (a.driver_id != b.driver_id) return a.driver_id < b.driver_id;
    return a.duty_index < b.duty_index;
  };
  if (static_cast<int>(found.size()) > k) {
    std::partial_sort(found.begin(), found.begin() + k, found.end(), order);
    found.resize(k);
  } else {
    std::sort(found.begin(), found.end(), order);
  }
  return found;
}

namespace {

Schedule decode(const std::vector<double>& x, const MasterModel& master, const DutyPool& pool,
                const Instance& instance) {
  Schedule s;
  s.instance_ref = instance.name;
  for (const auto& [did, row] : master.convexity_row) s.assignments[did];

  // task -> (column cost, driver) over selected duty columns
  std::map<int, std::vector<std::pair<double, int>>> covers;
  for (std::size_t j = 0; j < master.columns.size(); ++j) {
    const MasterColumn& col = master.columns[j];
    if (x[j] < 0.5 || col.driver_id < 0 || col.duty_index < 0) continue;
    s.assignments[col.driver_id] = pool.entries(col.duty_index);
    for (int tid : pool.duties[col.duty_index]) covers[tid].push_back({col.cost, col.driver_id});
  }

  for (auto& [tid, who] : covers) {
    if (who.size() < 2) continue;
    std::sort(who.begin(), who.end());  // cheapest duty keeps the drive
    for (std::size_t i = 1; i < who.size(); ++i) {
      std::vector<AssignmentEntry>& lane = s.assignments[who[i].second];
      auto it = std::find_if(lane.begin(), lane.end(),
                             [&](const AssignmentEntry& e) { return e.task == tid; });
      it->mode = AssignMode::Deadhead;
      const Driver& drv = instance.driver(who[i].second);
      if (check_duty(lane, drv, instance, instance.rules).feasible) continue;
      lane.erase(it);
      if (!check_duty(lane, drv, instance, instance.rules).feasible)
        throw Error("over-covered task " + std::to_string(tid) +
                    " cannot be demoted or dropped from driver " +
                    std::to_string(who[i].second));
    }
  }

  for (const Task& t : instance.tasks)
    if (!covers.count(t.id)) s.unassigned.insert(t.id);
  return s;
}

}  // namespace

CgResult solve_cg(const Instance& instance, const std::set<int>& absent, const DutyPool& pool,
                  const CgConfig& config) {
  if (pool.size() == 0) throw InputError("duty pool is empty");
  schedule_from_instance(instance, absent);  // validates the absent set

  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  if (elapsed() >= config.time_limit_seconds)
    throw TimeLimitError("time limit expired before the first master solve");

  MasterModel master = build_master(instance, absent, pool);

  CgResult res;
  MasterModel clean;  // master as of the last clean solve; stall fallback
  while (true) {
    LpSolution sol = solve_lp(master.lp, config.tol, config.lp_iteration_limit);
    if (sol.status == LpStatus::IterationLimit && res.state.iteration > 0) {
      // A re-solve ran out of pivots. Roll back to the last clean master so
      // lp_bound stays a bound for the integer finish, and stop pricing.
      res.stalled = true;
      master = std::move(clean);
      break;
    }
    if (sol.status != LpStatus::Optimal)
      throw Error(std::string("master LP ended ") + lp_status_name(sol.status));
    ++res.state.iteration;
    res.state.master_obj = sol.objective;
    res.state.duals = extract_duals(master, sol);
    res.trace.push_back({res.state.iteration, sol.objective, master.lp.n_cols(), elapsed()});

    if (elapsed() >= config.time_limit_seconds) {
      res.time_limited = true;
      break;
    }
    if (master.lp.n_cols() > std::max(3 * master.lp.n_rows(), 800))
      shrink_master(master, sol, res.state.duals, pool, instance, config.tol.optimality);
    clean = master;

    auto priced =
        price(pool, master, res.state.duals, config.k, instance, config.tol.optimality);
    if (priced.empty()) break;
    for (const PricedColumn& pc : priced)
      master.add_duty_column(pool, pc.duty_index, pc.driver_id, instance);
    res.state.columns_added_total += static_cast<int>(priced.size());
  }
  res.lp_bound = res.state.master_obj;

  LinearProgram finish = master.lp;
  std::vector<int> ints(finish.n_cols());
  for (int j = 0; j < finish.n_cols(); ++j) {
    finish.upper[j] = 1.0;
    ints[j] = j;
  }
  IlpResult ir = solve_ilp(finish, ints, config.tol, config.ilp_node_limit);
  if (ir.x.empty())
    throw Error(std::string("integer finish ended ") + lp_status_name(ir.status) +
                " without an incumbent");
  res.ilp_objective = ir.objective;
  res.ilp_nodes = ir.nodes;

  res.schedule = decode(ir.x, master, pool, instance);
  auto verdicts = validate_schedule(res.schedule, instance);
  if (!verdicts.empty())
    throw Error("decoded schedule fails validation: " +
                std::string(violation_name(*verdicts.front().second.violation)));
  res.objective = evaluate(res.schedule, instance);
  res.state.wall_time_used = elapsed();
  return res;
}

}  // namespace crew
