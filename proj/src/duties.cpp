#include "crew/duties.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "crew/feasibility.hpp"

namespace crew {

std::vector<AssignmentEntry> DutyPool::entries(int duty_index) const {
  std::vector<AssignmentEntry> out;
  out.reserve(duties[duty_index].size());
  for (int tid : duties[duty_index]) out.push_back({tid, AssignMode::Drive});
  return out;
}

namespace {

// Shared recursion for enumeration and counting. Descends only through
// prefixes satisfying the prefix-monotone constraints (chronology with
// transfer gap, depot chaining, length cap); the break rule is applied at
// emission because a later gap can still supply the missing break.
struct Enumerator {
  std::span<const Task> tasks;
  const FeasibilityRules& rules;
  int max_tasks;

  // tasks grouped by start depot, each group in ascending id order so the
  // pre-order walk emits sequences in lexicographic order
  std::vector<std::vector<const Task*>> by_start_depot;
  std::vector<char> used;

  std::vector<int> current;
  int first_start = 0;
  int first_depot = -1;
  int break_sum = 0;
  bool has_break = false;

  DutyPool* pool = nullptr;          // set when materializing
  DutyCount count;
  std::uint64_t budget = UINT64_MAX;

  explicit Enumerator(std::span<const Task> tasks_, const FeasibilityRules& rules_,
                      int max_tasks_)
      : tasks(tasks_), rules(rules_), max_tasks(max_tasks_) {
    int max_depot = -1;
    int max_id = -1;
    for (const Task& t : tasks) {
      max_depot = std::max({max_depot, t.start_depot, t.end_depot});
      max_id = std::max(max_id, t.id);
    }
    by_start_depot.resize(max_depot + 1);
    used.assign(max_id + 1, 0);
    std::vector<const Task*> sorted;
    for (const Task& t : tasks) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(),
              [](const Task* a, const Task* b) { return a->id < b->id; });
    for (const Task* t : sorted) by_start_depot[t->start_depot].push_back(t);
  }

  void emit(const Task& last) {
    int working = (last.end_time - first_start) - break_sum;
    if (working > rules.break_threshold_minutes && !has_break) return;
    if (pool) {
      pool->duties.push_back(current);
      pool->stats.push_back({working, first_start, last.end_time, first_depot, last.end_depot});
    }
    ++count.count;
    // vector header + ints + per-duty stats record
    count.projected_bytes += 24 + 4 * current.size() + sizeof(DutyPool::DutyStats);
    if (count.projected_bytes > budget)
      throw BudgetError("duty pool would exceed the memory budget at " +
                        std::to_string(count.count) + " duties");
  }

  void extend(const Task& last) {
    emit(last);
    if (static_cast<int>(current.size()) == max_tasks) return;
    if (last.end_depot >= static_cast<int>(by_start_depot.size())) return;
    for (const Task* next : by_start_depot[last.end_depot]) {
      if (used[next->id]) continue;
      int gap = next->start_time - last.end_time;
      if (gap < rules.min_transfer_minutes) continue;
      used[next->id] = 1;
      current.push_back(next->id);
      bool was_break = has_break;
      if (gap >= rules.min_break_minutes) {
        break_sum += gap;
        has_break = true;
      }
      extend(*next);
      if (gap >= rules.min_break_minutes) {
        break_sum -= gap;
        has_break = was_break;
      }
      current.pop_back();
      used[next->id] = 0;
    }
  }

  void run() {
    std::vector<const Task*> roots;
    for (const auto& group : by_start_depot)
      for (const Task* t : group) roots.push_back(t);
    std::sort(roots.begin(), roots.end(),
              [](const Task* a, const Task* b) { return a->id < b->id; });
    for (const Task* t : roots) {
      used[t->id] = 1;
      current.push_back(t->id);
      first_start = t->start_time;
      first_depot = t->start_depot;
      break_sum = 0;
      has_break = false;
      extend(*t);
      current.pop_back();
      used[t->id] = 0;
    }
  }
};

}  // namespace

DutyPool enumerate_duties(std::span<const Task> tasks, const FeasibilityRules& rules,
                          int max_tasks) {
  if (max_tasks < 1) throw InputError("max_tasks must be at least 1");
  DutyPool pool;
  Enumerator e(tasks, rules, max_tasks);
  e.pool = &pool;
  e.run();
  return pool;
}

DutyCount count_duties(std::span<const Task> tasks, const FeasibilityRules& rules, int max_tasks,
                       std::uint64_t memory_budget_bytes) {
  if (max_tasks < 1) throw InputError("max_tasks must be at least 1");
  if (memory_budget_bytes == 0) throw InputError("memory budget must be positive");
  Enumerator e(tasks, rules, max_tasks);
  e.budget = memory_budget_bytes;
  e.run();
  return e.count;
}

namespace {

struct Envelope {
  std::uint64_t regions, vehicles;
  int start_req, end_req;
  int shift_start, shift_end;
  DriverKind kind;
  int original_working;
  auto key() const {
    return std::make_tuple(regions, vehicles, start_req, end_req, shift_start, shift_end,
                           kind == DriverKind::Standby, original_working);
  }
};

}  // namespace

void build_driver_index(DutyPool& pool, const Instance& instance,
                        const FeasibilityRules& rules) {
  pool.per_driver_index.clear();

  // combined license requirement per duty: covering the union covers each task
  std::vector<LicenseClass> needed(pool.duties.size());
  for (std::size_t j = 0; j < pool.duties.size(); ++j) {
    for (int tid : pool.duties[j]) {
      const Task& t = instance.task(tid);
      needed[j].regions |= t.required_license.regions;
      needed[j].vehicles |= t.required_license.vehicles;
    }
  }

  std::map<decltype(std::declval<Envelope>().key()), std::vector<int>> groups;
  std::vector<Envelope> envelopes(instance.drivers.size());
  for (const Driver& d : instance.drivers) {
    Envelope env;
    env.regions = d.license.regions;
    env.vehicles = d.license.vehicles;
    env.start_req = d.home_depot;
    env.end_req = d.home_depot;
    if (d.relocated && !d.original_tasks.empty()) {
      env.start_req = instance.task(d.original_tasks.front()).start_depot;
      env.end_req = instance.task(d.original_tasks.back()).end_depot;
    }
    env.shift_start = d.shift_start;
    env.shift_end = d.shift_end;
    env.kind = d.kind;
    std::vector<AssignmentEntry> original;
    for (int tid : d.original_tasks) original.push_back({tid, AssignMode::Drive});
    env.original_working = working_minutes(original, instance, rules);
    envelopes[d.id] = env;
    groups[env.key()].push_back(d.id);
  }

  for (const auto& [key, driver_ids] : groups) {
    const Envelope& env = envelopes[driver_ids.front()];
    std::vector<int> feasible;
    for (int j = 0; j < pool.size(); ++j) {
      const DutyPool::DutyStats& st = pool.stats[j];
      if ((env.regions & needed[j].regions) != needed[j].regions) continue;
      if ((env.vehicles & needed[j].vehicles) != needed[j].vehicles) continue;
      if (st.start_depot != env.start_req || st.end_depot != env.end_req) continue;
      if (st.first_start < env.shift_start) continue;
      if (st.last_end > env.shift_end + rules.max_overtime_minutes) continue;
      int overtime = env.kind == DriverKind::Standby
                         ? std::max(0, st.last_end - env.shift_end) +
                               std::max(0, env.shift_start - st.first_start)
                         : std::max(0, st.working_min - env.original_working);
      if (overtime > rules.max_overtime_minutes) continue;
      feasible.push_back(j);
    }
    for (int d : driver_ids) pool.per_driver_index[d] = feasible;
  }
}

std::uint64_t pool_compatibility_hash(std::span<const Task> tasks,
                                      const FeasibilityRules& rules, int max_tasks) {
  std::uint64_t h = 0x9ae16a3b2f90404full;
  auto fold = [&h](std::uint64_t v) { h = mix64(h ^ v); };
  fold(rules.min_transfer_minutes);
  fold(rules.break_threshold_minutes);
  fold(rules.min_break_minutes);
  fold(rules.max_overtime_minutes);
  fold(rules.max_tasks_per_duty);
  fold(rules.deadhead_needs_license);
  fold(max_tasks);
  fold(tasks.size());
  for (const Task& t : tasks) {
    fold(t.id);
    fold(t.start_depot);
    fold(t.end_depot);
    fold(t.start_time);
    fold(t.end_time);
    fold(t.required_license.regions);
    fold(t.required_license.vehicles);
  }
  return h;
}

}  // namespace crew
