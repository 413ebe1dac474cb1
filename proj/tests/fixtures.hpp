#ifndef TESTS_FIXTURES_HPP
#define TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "crew/model.hpp"

namespace fix {

inline crew::Task task(int id, int from, int to, int start, int end, std::uint64_t regions = 1,
                       std::uint64_t vehicles = 1, int train = -1) {
  crew::Task t;
  t.id = id;
  t.start_depot = from;
  t.end_depot = to;
  t.start_time = start;
  t.end_time = end;
  t.required_license = {regions, vehicles};
  t.train_id = train < 0 ? id : train;
  return t;
}

inline crew::Driver driver(int id, crew::DriverKind kind, int home, int shift_start,
                           int shift_end, std::vector<int> tasks, std::uint64_t regions = ~0ull,
                           std::uint64_t vehicles = ~0ull, bool relocated = false) {
  crew::Driver d;
  d.id = id;
  d.kind = kind;
  d.home_depot = home;
  d.shift_start = shift_start;
  d.shift_end = shift_end;
  d.license = {regions, vehicles};
  d.original_tasks = std::move(tasks);
  d.relocated = relocated;
  return d;
}

inline crew::Instance instance(int n_depots, std::vector<crew::Task> tasks,
                               std::vector<crew::Driver> drivers) {
  crew::Instance ins;
  ins.name = "toy";
  for (int i = 0; i < n_depots; ++i) ins.depots.push_back({i, "D" + std::to_string(i)});
  ins.tasks = std::move(tasks);
  ins.drivers = std::move(drivers);
  return ins;
}

inline std::vector<crew::AssignmentEntry> drive_all(const std::vector<int>& ids) {
  std::vector<crew::AssignmentEntry> out;
  for (int id : ids) out.push_back({id, crew::AssignMode::Drive});
  return out;
}

}  // namespace fix

#endif
