#ifndef CREW_OBJECTIVE_HPP
#define CREW_OBJECTIVE_HPP

#include <array>

#include "crew/model.hpp"

namespace crew {

// Whole-schedule objective decomposition. Buckets count drivers by overtime
// duration, index 0 = more than bucket3 minutes, 3 = up to bucket1 minutes.
struct ObjectiveBreakdown {
  int unassigned_count = 0;
  std::array<int, 4> overtime_buckets{};  // [>3h, 2-3h, 1-2h, <1h]
  double operating_overtime_hours = 0.0;
  double standby_overtime_hours = 0.0;
  int changed_count = 0;
  double total = 0.0;
};

// One driver's share of the objective; the unit the tabu solver adds and
// removes when costing candidate moves.
struct DriverShare {
  int bucket = -1;  // index into overtime_buckets, -1 when no overtime
  double overtime_hours = 0.0;
  bool operating = false;
  bool changed = false;
};

// -1 when no overtime, else bucket index per the weights' minute thresholds.
int overtime_bucket(int overtime_min, const ObjectiveWeights& w);

DriverShare driver_share(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                         const Instance& instance);

double share_cost(const DriverShare& share, const ObjectiveWeights& w);

void add_share(ObjectiveBreakdown& b, const DriverShare& share);
void remove_share(ObjectiveBreakdown& b, const DriverShare& share);

// Recomputes `total` from the tallies; the single place the linear form lives.
void refresh_total(ObjectiveBreakdown& b, const ObjectiveWeights& w);

// Evaluates a validated schedule.
ObjectiveBreakdown evaluate(const Schedule& s, const Instance& instance);

// Per-duty column cost c of the set-covering reformulation. For available
// drivers it is the driver's share of the schedule objective when working
// exactly this duty; evaluate() decomposes into these costs plus alpha per
// unassigned task.
double duty_cost(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                 const Instance& instance);

// Cost of a shadow column covering `n_tasks` tasks (cancelling them).
double shadow_cost(int n_tasks, const ObjectiveWeights& w);

}  // namespace crew

#endif  // CREW_OBJECTIVE_HPP
