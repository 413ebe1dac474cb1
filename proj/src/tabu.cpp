#include "crew/tabu.hpp"

#include <algorithm>
#include <random>

#include "crew/feasibility.hpp"

namespace crew {

bool TabuList::is_tabu(std::uint64_t fingerprint, int iteration, int tenure) const {
  auto it = entries.find(fingerprint);
  return it != entries.end() && iteration <= it->second + tenure;
}

void TabuList::update(std::uint64_t fingerprint, int iteration, int tenure) {
  entries[fingerprint] = iteration;
  for (auto it = entries.begin(); it != entries.end();)
    it = it->second <= iteration - tenure ? entries.erase(it) : std::next(it);
}

namespace {

// One way of bridging a depot mismatch on one side of the selected task.
struct ExtraOption {
  std::vector<AssignmentEntry> entries;
  const char* kind = "none";
  int unassigned_used = -1;  // pool task consumed by this bridge, -1 if none
};

// Bridges leading from depot `from` to depot `to`, timed inside
// [earliest_start, latest_end] with the transfer gap to both anchors already
// subtracted by the caller. Rides may span 1..max_chain consecutive driven
// tasks of one other driver; a second unassigned task may be driven instead.
void collect_bridges(std::vector<ExtraOption>& out, const Schedule& s, const Instance& instance,
                     const Driver& target, int selected, int from, int to, int earliest_start,
                     int latest_end, int max_chain) {
  if (from == to) out.push_back({{}, "none", -1});

  for (const auto& [oid, olane] : s.assignments) {
    if (oid == target.id) continue;
    for (std::size_t i = 0; i < olane.size(); ++i) {
      if (olane[i].mode != AssignMode::Drive) continue;
      const Task& first = instance.task(olane[i].task);
      if (first.start_depot != from || first.start_time < earliest_start) continue;
      std::vector<AssignmentEntry> chain;
      for (std::size_t j = i; j < olane.size() && static_cast<int>(chain.size()) < max_chain;
           ++j) {
        if (olane[j].mode != AssignMode::Drive) break;
        const Task& t = instance.task(olane[j].task);
        if (t.end_time > latest_end) break;
        chain.push_back({olane[j].task, AssignMode::Deadhead});
        if (t.end_depot == to)
          out.push_back({chain, chain.size() == 1 ? "deadhead" : "chain", -1});
      }
    }
  }

  for (int u : s.unassigned) {
    if (u == selected) continue;
    const Task& t = instance.task(u);
    if (t.start_depot != from || t.end_depot != to) continue;
    if (t.start_time < earliest_start || t.end_time > latest_end) continue;
    if (!target.license.covers(t.required_license)) continue;
    out.push_back({{{u, AssignMode::Drive}}, "unassigned", u});
  }
}

}  // namespace

std::vector<Neighbor> neighbors(const Schedule& s, int task_id, const Instance& instance,
                                const TabuConfig& config, const TabuList& tabu, int iteration) {
  if (!s.unassigned.count(task_id)) throw InputError("selected task is not in the pool");
  const Task& g = instance.task(task_id);
  const FeasibilityRules& rules = instance.rules;
  const int mt = rules.min_transfer_minutes;

  // tasks currently ridden by anyone: dropping their driver would strand them
  std::set<int> deadheaded;
  for (const auto& [did, lane] : s.assignments)
    for (const AssignmentEntry& e : lane)
      if (e.mode == AssignMode::Deadhead) deadheaded.insert(e.task);

  ObjectiveBreakdown base = evaluate(s, instance);
  std::uint64_t fp_s = schedule_fingerprint(s);

  std::vector<Neighbor> out;
  std::set<std::uint64_t> seen;

  for (const auto& [did, lane] : s.assignments) {
    const Driver& drv = instance.driver(did);
    if (!drv.license.covers(g.required_license)) continue;
    if (g.start_time < drv.shift_start ||
        g.end_time > drv.shift_end + rules.max_overtime_minutes)
      continue;

    // split the duty around the selected task's padded time window
    std::vector<AssignmentEntry> before, after, conflicts;
    for (const AssignmentEntry& e : lane) {
      const Task& t = instance.task(e.task);
      if (t.end_time + mt <= g.start_time) before.push_back(e);
      else if (t.start_time >= g.end_time + mt) after.push_back(e);
      else conflicts.push_back(e);
    }

    // conflicting rides are dropped silently; conflicting driven tasks go
    // back to the pool unless someone is riding them
    std::vector<int> removed_to_pool;
    bool removable = true;
    for (const AssignmentEntry& e : conflicts)
      if (e.mode == AssignMode::Drive) {
        if (deadheaded.count(e.task)) {
          removable = false;
          break;
        }
        removed_to_pool.push_back(e.task);
      }
    if (!removable) continue;

    int start_req = drv.home_depot, end_req = drv.home_depot;
    if (drv.relocated && !drv.original_tasks.empty()) {
      start_req = instance.task(drv.original_tasks.front()).start_depot;
      end_req = instance.task(drv.original_tasks.back()).end_depot;
    }
    bool has_prev = !before.empty(), has_next = !after.empty();
    int from_depot = has_prev ? instance.task(before.back().task).end_depot : start_req;
    int to_depot = has_next ? instance.task(after.front().task).start_depot : end_req;
    int front_lo = has_prev ? instance.task(before.back().task).end_time + mt : drv.shift_start;
    int back_hi = has_next ? instance.task(after.front().task).start_time - mt
                           : drv.shift_end + rules.max_overtime_minutes;

    std::vector<ExtraOption> fronts, backs;
    collect_bridges(fronts, s, instance, drv, task_id, from_depot, g.start_depot, front_lo,
                    g.start_time - mt, config.max_deadhead_chain);
    collect_bridges(backs, s, instance, drv, task_id, g.end_depot, to_depot, g.end_time + mt,
                    back_hi, config.max_deadhead_chain);
    if (fronts.empty() || backs.empty()) continue;

    std::uint64_t lane_hash_old = driver_lane_hash(did, lane);
    DriverShare share_old = driver_share(lane, drv, instance);

    for (const ExtraOption& front : fronts) {
      for (const ExtraOption& back : backs) {
        if (front.unassigned_used >= 0 && front.unassigned_used == back.unassigned_used)
          continue;
        int inserted_drive =
            1 + (front.unassigned_used >= 0 ? 1 : 0) + (back.unassigned_used >= 0 ? 1 : 0);
        if (static_cast<int>(removed_to_pool.size()) - inserted_drive > config.m_diff) continue;
        int new_len = static_cast<int>(before.size() + after.size() + front.entries.size() +
                                       back.entries.size()) +
                      1;
        if (new_len > rules.max_tasks_per_duty) continue;

        std::vector<AssignmentEntry> lane2 = before;
        lane2.insert(lane2.end(), front.entries.begin(), front.entries.end());
        lane2.push_back({task_id, AssignMode::Drive});
        lane2.insert(lane2.end(), back.entries.begin(), back.entries.end());
        lane2.insert(lane2.end(), after.begin(), after.end());
        if (!check_duty(lane2, drv, instance, rules).feasible) continue;

        std::uint64_t fp = fp_s - lane_hash_old + driver_lane_hash(did, lane2) -
                           unassigned_task_hash(task_id);
        if (front.unassigned_used >= 0) fp -= unassigned_task_hash(front.unassigned_used);
        if (back.unassigned_used >= 0) fp -= unassigned_task_hash(back.unassigned_used);
        for (int r : removed_to_pool) fp += unassigned_task_hash(r);
        if (tabu.is_tabu(fp, iteration, config.tabu_tenure)) continue;
        if (!seen.insert(fp).second) continue;

        ObjectiveBreakdown b = base;
        remove_share(b, share_old);
        add_share(b, driver_share(lane2, drv, instance));
        b.unassigned_count += static_cast<int>(removed_to_pool.size()) - inserted_drive;
        refresh_total(b, instance.weights);

        Neighbor nb;
        nb.schedule = s;
        nb.schedule.assignments[did] = lane2;
        nb.schedule.unassigned.erase(task_id);
        if (front.unassigned_used >= 0) nb.schedule.unassigned.erase(front.unassigned_used);
        if (back.unassigned_used >= 0) nb.schedule.unassigned.erase(back.unassigned_used);
        for (int r : removed_to_pool) nb.schedule.unassigned.insert(r);
        nb.fingerprint = fp;
        nb.objective = b;
        nb.move.target_driver = did;
        for (const AssignmentEntry& e : front.entries) nb.move.inserted.push_back(e.task);
        nb.move.inserted.push_back(task_id);
        for (const AssignmentEntry& e : back.entries) nb.move.inserted.push_back(e.task);
        nb.move.removed = removed_to_pool;
        nb.move.extra_front = front.kind;
        nb.move.extra_back = back.kind;
        out.push_back(std::move(nb));
      }
    }
  }
  return out;
}

const Neighbor& select_best(const std::vector<Neighbor>& candidates) {
  if (candidates.empty()) throw NoNeighborError("no feasible neighbor");
  const Neighbor* best = &candidates.front();
  for (const Neighbor& c : candidates) {
    if (&c == best) continue;
    if (c.objective.total != best->objective.total) {
      if (c.objective.total < best->objective.total) best = &c;
      continue;
    }
    if (c.move.removed.size() != best->move.removed.size()) {
      if (c.move.removed.size() < best->move.removed.size()) best = &c;
      continue;
    }
    if (c.move.target_driver != best->move.target_driver) {
      if (c.move.target_driver < best->move.target_driver) best = &c;
      continue;
    }
    std::vector<int> a = c.move.inserted, b = best->move.inserted;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a < b) best = &c;
  }
  return *best;
}

TabuResult solve_tabu(const Instance& instance, const std::set<int>& absent,
                      const TabuConfig& config,
                      const std::function<void(const TraceRow&, const Schedule&)>& on_iteration) {
  if (config.max_iterations < 1 || config.tabu_tenure < 1 || config.max_task_failures < 1 ||
      config.m_diff < 1 || config.max_deadhead_chain < 1)
    throw InputError("tabu configuration values must be positive");

  Schedule s = schedule_from_instance(instance, absent);
  if (!validate_schedule(s, instance).empty())
    throw InputError("initial schedule is infeasible");

  TabuResult res;
  ObjectiveBreakdown cur = evaluate(s, instance);
  res.best = s;
  res.best_objective = cur;
  res.termination = "max_iterations";

  TabuList tabu;
  std::mt19937_64 rng(config.rng_seed);
  std::map<int, int> failures;

  for (int i = 1; i <= config.max_iterations; ++i) {
    if (s.unassigned.empty()) {
      res.termination = "pool_empty";
      break;
    }
    std::vector<int> eligible;
    for (int u : s.unassigned)
      if (failures[u] < config.max_task_failures) eligible.push_back(u);
    if (eligible.empty()) {
      res.termination = "all_tasks_failed";
      break;
    }
    int g = eligible[std::uniform_int_distribution<int>(
        0, static_cast<int>(eligible.size()) - 1)(rng)];

    auto cands = neighbors(s, g, instance, config, tabu, i);

    TraceRow row;
    row.iteration = i;
    row.selected_task = g;
    row.neighborhood = static_cast<int>(cands.size());

    if (!cands.empty()) {
      const Neighbor& pick = select_best(cands);
      if (pick.objective.total <= res.best_objective.total) {
        s = pick.schedule;
        cur = pick.objective;
        res.best = s;
        res.best_objective = cur;
        tabu.update(pick.fingerprint, i, config.tabu_tenure);
        row.accepted = true;
        row.move = pick.move;
      } else if (config.always_move) {
        s = pick.schedule;
        cur = pick.objective;
        tabu.update(pick.fingerprint, i, config.tabu_tenure);
        row.move = pick.move;
      }
    }
    if (s.unassigned.count(g)) ++failures[g];

    row.objective = cur.total;
    row.best_objective = res.best_objective.total;
    row.unassigned = static_cast<int>(s.unassigned.size());
    res.trace.push_back(row);
    res.iterations = i;
    if (on_iteration) on_iteration(row, s);
  }
  return res;
}

}  // namespace crew
