#include "crew/objective.hpp"

#include <algorithm>

#include "crew/feasibility.hpp"

namespace crew {

int overtime_bucket(int overtime_min, const ObjectiveWeights& w) {
  if (overtime_min <= 0) return -1;
  if (overtime_min > w.bucket3) return 0;
  if (overtime_min > w.bucket2) return 1;
  if (overtime_min > w.bucket1) return 2;
  return 3;
}

namespace {

bool entries_changed(const std::vector<AssignmentEntry>& entries, const Driver& driver) {
  if (entries.size() != driver.original_tasks.size()) return true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].task != driver.original_tasks[i]) return true;
    if (entries[i].mode != AssignMode::Drive) return true;
  }
  return false;
}

}  // namespace

DriverShare driver_share(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                         const Instance& instance) {
  DriverShare share;
  share.operating = driver.kind != DriverKind::Standby;
  int ot = overtime_minutes(entries, driver, instance, instance.rules);
  share.bucket = overtime_bucket(ot, instance.weights);
  share.overtime_hours = ot / 60.0;
  share.changed = entries_changed(entries, driver);
  return share;
}

double share_cost(const DriverShare& share, const ObjectiveWeights& w) {
  double cost = 0.0;
  switch (share.bucket) {
    case 0: cost += w.beta4; break;
    case 1: cost += w.beta3; break;
    case 2: cost += w.beta2; break;
    case 3: cost += w.beta1; break;
    default: break;
  }
  cost += (share.operating ? w.gamma2 : w.gamma1) * share.overtime_hours;
  if (share.changed) cost += w.lambda;
  return cost;
}

void add_share(ObjectiveBreakdown& b, const DriverShare& share) {
  if (share.bucket >= 0) ++b.overtime_buckets[share.bucket];
  if (share.operating)
    b.operating_overtime_hours += share.overtime_hours;
  else
    b.standby_overtime_hours += share.overtime_hours;
  if (share.changed) ++b.changed_count;
}

void remove_share(ObjectiveBreakdown& b, const DriverShare& share) {
  if (share.bucket >= 0) --b.overtime_buckets[share.bucket];
  if (share.operating)
    b.operating_overtime_hours -= share.overtime_hours;
  else
    b.standby_overtime_hours -= share.overtime_hours;
  if (share.changed) --b.changed_count;
}

void refresh_total(ObjectiveBreakdown& b, const ObjectiveWeights& w) {
  b.total = w.alpha * b.unassigned_count + w.beta4 * b.overtime_buckets[0] +
            w.beta3 * b.overtime_buckets[1] + w.beta2 * b.overtime_buckets[2] +
            w.beta1 * b.overtime_buckets[3] + w.gamma2 * b.operating_overtime_hours +
            w.gamma1 * b.standby_overtime_hours + w.lambda * b.changed_count;
}

ObjectiveBreakdown evaluate(const Schedule& s, const Instance& instance) {
  ObjectiveBreakdown b;
  b.unassigned_count = static_cast<int>(s.unassigned.size());
  for (const auto& [driver_id, entries] : s.assignments)
    add_share(b, driver_share(entries, instance.driver(driver_id), instance));
  refresh_total(b, instance.weights);
  return b;
}

double duty_cost(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                 const Instance& instance) {
  if (driver.kind == DriverKind::Shadow)
    return shadow_cost(static_cast<int>(entries.size()), instance.weights);
  return share_cost(driver_share(entries, driver, instance), instance.weights);
}

double shadow_cost(int n_tasks, const ObjectiveWeights& w) { return w.alpha * n_tasks; }

}  // namespace crew
