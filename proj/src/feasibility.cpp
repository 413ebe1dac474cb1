#include "crew/feasibility.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace crew {

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::TimeConflict: return "TimeConflict";
    case Violation::GeoGap: return "GeoGap";
    case Violation::OutsideShift: return "OutsideShift";
    case Violation::LicenseMismatch: return "LicenseMismatch";
    case Violation::DepotInconsistency: return "DepotInconsistency";
    case Violation::MissingBreak: return "MissingBreak";
    case Violation::OvertimeExceeded: return "OvertimeExceeded";
    case Violation::TooManyTasks: return "TooManyTasks";
    case Violation::DeadheadUncovered: return "DeadheadUncovered";
    case Violation::PartitionBroken: return "PartitionBroken";
  }
  return "?";
}

int working_minutes(const std::vector<AssignmentEntry>& entries, const Instance& instance,
                    const FeasibilityRules& rules) {
  if (entries.empty()) return 0;
  const Task* prev = &instance.task(entries.front().task);
  int span_start = prev->start_time;
  int breaks = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const Task& cur = instance.task(entries[i].task);
    int gap = cur.start_time - prev->end_time;
    if (gap >= rules.min_break_minutes) breaks += gap;
    prev = &cur;
  }
  return (prev->end_time - span_start) - breaks;
}

int overtime_minutes(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                     const Instance& instance, const FeasibilityRules& rules) {
  if (entries.empty()) return 0;
  if (driver.kind == DriverKind::Standby) {
    int first_start = instance.task(entries.front().task).start_time;
    int last_end = instance.task(entries.back().task).end_time;
    return std::max(0, last_end - driver.shift_end) +
           std::max(0, driver.shift_start - first_start);
  }
  std::vector<AssignmentEntry> original;
  original.reserve(driver.original_tasks.size());
  for (int tid : driver.original_tasks) original.push_back({tid, AssignMode::Drive});
  return std::max(0, working_minutes(entries, instance, rules) -
                         working_minutes(original, instance, rules));
}

FeasibilityVerdict check_duty(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                              const Instance& instance, const FeasibilityRules& rules) {
  if (entries.empty()) return FeasibilityVerdict::ok();

  bool time_conflict = false;
  bool geo_gap = false;
  const Task* prev = nullptr;
  for (const AssignmentEntry& e : entries) {
    const Task& t = instance.task(e.task);  // throws InstanceError on dangling id
    if (prev) {
      if (t.start_time - prev->end_time < rules.min_transfer_minutes) time_conflict = true;
      if (prev->end_depot != t.start_depot) geo_gap = true;
    }
    prev = &t;
  }
  if (time_conflict) return FeasibilityVerdict::fail(Violation::TimeConflict);
  if (geo_gap) return FeasibilityVerdict::fail(Violation::GeoGap);

  const Task& first = instance.task(entries.front().task);
  const Task& last = instance.task(entries.back().task);
  if (first.start_time < driver.shift_start ||
      last.end_time > driver.shift_end + rules.max_overtime_minutes)
    return FeasibilityVerdict::fail(Violation::OutsideShift);

  for (const AssignmentEntry& e : entries) {
    if (e.mode == AssignMode::Deadhead && !rules.deadhead_needs_license) continue;
    if (!driver.license.covers(instance.task(e.task).required_license))
      return FeasibilityVerdict::fail(Violation::LicenseMismatch);
  }

  int start_req = driver.home_depot;
  int end_req = driver.home_depot;
  if (driver.relocated && !driver.original_tasks.empty()) {
    start_req = instance.task(driver.original_tasks.front()).start_depot;
    end_req = instance.task(driver.original_tasks.back()).end_depot;
  }
  if (first.start_depot != start_req || last.end_depot != end_req)
    return FeasibilityVerdict::fail(Violation::DepotInconsistency);

  if (working_minutes(entries, instance, rules) > rules.break_threshold_minutes) {
    bool has_break = false;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      int gap = instance.task(entries[i].task).start_time -
                instance.task(entries[i - 1].task).end_time;
      if (gap >= rules.min_break_minutes) has_break = true;
    }
    if (!has_break) return FeasibilityVerdict::fail(Violation::MissingBreak);
  }

  if (overtime_minutes(entries, driver, instance, rules) > rules.max_overtime_minutes)
    return FeasibilityVerdict::fail(Violation::OvertimeExceeded);

  if (static_cast<int>(entries.size()) > rules.max_tasks_per_duty)
    return FeasibilityVerdict::fail(Violation::TooManyTasks);

  return FeasibilityVerdict::ok();
}

std::vector<std::pair<int, FeasibilityVerdict>> validate_schedule(const Schedule& s,
                                                                  const Instance& instance) {
  std::vector<std::pair<int, FeasibilityVerdict>> out;

  std::unordered_map<int, int> drive_owner;  // task -> driver
  std::vector<int> drive_count(instance.tasks.size(), 0);
  for (const auto& [driver_id, entries] : s.assignments) {
    instance.driver(driver_id);
    for (const AssignmentEntry& e : entries) {
      instance.task(e.task);
      if (e.mode == AssignMode::Drive) {
        ++drive_count[e.task];
        drive_owner.emplace(e.task, driver_id);
      }
    }
  }

  for (const auto& [driver_id, entries] : s.assignments) {
    FeasibilityVerdict v = check_duty(entries, instance.driver(driver_id), instance,
                                      instance.rules);
    if (!v.feasible) out.emplace_back(driver_id, v);
    for (const AssignmentEntry& e : entries) {
      if (e.mode != AssignMode::Deadhead) continue;
      auto it = drive_owner.find(e.task);
      if (it == drive_owner.end() || it->second == driver_id)
        out.emplace_back(driver_id, FeasibilityVerdict::fail(Violation::DeadheadUncovered));
    }
  }

  for (const Task& t : instance.tasks) {
    int n = drive_count[t.id] + static_cast<int>(s.unassigned.count(t.id));
    if (n != 1) out.emplace_back(-1, FeasibilityVerdict::fail(Violation::PartitionBroken));
  }
  for (int tid : s.unassigned)
    if (tid < 0 || tid >= static_cast<int>(instance.tasks.size()))
      out.emplace_back(-1, FeasibilityVerdict::fail(Violation::PartitionBroken));

  return out;
}

}  // namespace crew
