#include "crew/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace crew {

const Task& Instance::task(int id) const {
  if (id < 0 || id >= static_cast<int>(tasks.size()))
    throw InstanceError("unknown task id " + std::to_string(id));
  return tasks[id];
}

const Driver& Instance::driver(int id) const {
  if (id < 0 || id >= static_cast<int>(drivers.size()))
    throw InstanceError("unknown driver id " + std::to_string(id));
  return drivers[id];
}

std::vector<int> Instance::operating_ids() const {
  std::vector<int> ids;
  for (const Driver& d : drivers)
    if (d.kind == DriverKind::Operating) ids.push_back(d.id);
  return ids;
}

void Instance::validate() const {
  std::unordered_set<std::string> depot_names;
  for (std::size_t i = 0; i < depots.size(); ++i) {
    if (depots[i].id != static_cast<int>(i))
      throw InstanceError("depot ids must be dense 0..N-1");
    if (!depot_names.insert(depots[i].name).second)
      throw InstanceError("duplicate depot name: " + depots[i].name);
  }
  const int n_depots = static_cast<int>(depots.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    if (t.id != static_cast<int>(i)) throw InstanceError("task ids must be dense 0..N-1");
    if (t.start_depot < 0 || t.start_depot >= n_depots || t.end_depot < 0 ||
        t.end_depot >= n_depots)
      throw InstanceError("task " + std::to_string(t.id) + " references unknown depot");
    if (t.end_time <= t.start_time)
      throw InstanceError("task " + std::to_string(t.id) + " has non-positive duration");
    if (t.start_time < 0 || t.end_time > kHorizonMinutes)
      throw InstanceError("task " + std::to_string(t.id) + " outside the scheduling horizon");
  }
  std::vector<char> owned(tasks.size(), 0);
  for (std::size_t i = 0; i < drivers.size(); ++i) {
    const Driver& d = drivers[i];
    if (d.id != static_cast<int>(i)) throw InstanceError("driver ids must be dense 0..N-1");
    if (d.kind == DriverKind::Shadow)
      throw InstanceError("instances never contain a shadow driver");
    if (d.home_depot < 0 || d.home_depot >= n_depots)
      throw InstanceError("driver " + std::to_string(d.id) + " references unknown depot");
    if (d.shift_end <= d.shift_start)
      throw InstanceError("driver " + std::to_string(d.id) + " has an empty shift window");
    if (d.kind == DriverKind::Standby && !d.original_tasks.empty())
      throw InstanceError("standby driver " + std::to_string(d.id) + " has original tasks");
    int prev_end = -1;
    for (int tid : d.original_tasks) {
      const Task& t = task(tid);
      if (t.start_time < prev_end)
        throw InstanceError("driver " + std::to_string(d.id) +
                            " original duty is not chronological");
      prev_end = t.end_time;
      if (owned[tid]++)
        throw InstanceError("task " + std::to_string(tid) + " appears in two original duties");
    }
  }
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!owned[i]) throw InstanceError("task " + std::to_string(i) + " belongs to no duty");
}

Schedule schedule_from_instance(const Instance& instance, const std::set<int>& absent) {
  for (int id : absent) {
    const Driver& d = instance.driver(id);  // throws on unknown id
    if (d.kind != DriverKind::Operating)
      throw InstanceError("absent driver " + std::to_string(id) + " is not an operating driver");
  }
  Schedule s;
  s.instance_ref = instance.name;
  for (const Driver& d : instance.drivers) {
    if (absent.count(d.id)) {
      for (int tid : d.original_tasks) s.unassigned.insert(tid);
      continue;
    }
    std::vector<AssignmentEntry>& entries = s.assignments[d.id];
    entries.reserve(d.original_tasks.size());
    for (int tid : d.original_tasks) entries.push_back({tid, AssignMode::Drive});
  }
  return s;
}

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t entry_list_hash(const std::vector<AssignmentEntry>& entries) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const AssignmentEntry& e : entries) {
    h = mix64(h ^ static_cast<std::uint64_t>(e.task));
    h = mix64(h ^ (e.mode == AssignMode::Deadhead ? 0x517cc1b727220a95ull : 0));
  }
  return h;
}

std::uint64_t driver_lane_hash(int driver_id, const std::vector<AssignmentEntry>& entries) {
  return mix64(mix64(static_cast<std::uint64_t>(driver_id) ^ 0xa0761d6478bd642full) ^
               entry_list_hash(entries));
}

std::uint64_t unassigned_task_hash(int task_id) {
  return mix64(static_cast<std::uint64_t>(task_id) ^ 0xe7037ed1a0b428dbull);
}

std::uint64_t schedule_fingerprint(const Schedule& s) {
  std::uint64_t h = 0;
  for (const auto& [driver_id, entries] : s.assignments)
    h += driver_lane_hash(driver_id, entries);
  for (int tid : s.unassigned) h += unassigned_task_hash(tid);
  return h;
}

}  // namespace crew
