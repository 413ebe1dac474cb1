#ifndef CREW_FEASIBILITY_HPP
#define CREW_FEASIBILITY_HPP

#include <optional>
#include <utility>
#include <vector>

#include "crew/model.hpp"

namespace crew {

// The restriction families checked on every duty, in the fixed reporting
// order. DeadheadUncovered and PartitionBroken are schedule-level and only
// produced by validate_schedule.
enum class Violation {
  TimeConflict,
  GeoGap,
  OutsideShift,
  LicenseMismatch,
  DepotInconsistency,
  MissingBreak,
  OvertimeExceeded,
  TooManyTasks,
  DeadheadUncovered,
  PartitionBroken,
};

const char* violation_name(Violation v);

struct FeasibilityVerdict {
  bool feasible = true;
  std::optional<Violation> violation;

  static FeasibilityVerdict ok() { return {}; }
  static FeasibilityVerdict fail(Violation v) { return {false, v}; }
  friend bool operator==(const FeasibilityVerdict&, const FeasibilityVerdict&) = default;
};

// Paid time of a duty: span minus gaps long enough to count as breaks.
// Gaps shorter than min_break_minutes are paid transit time.
int working_minutes(const std::vector<AssignmentEntry>& entries, const Instance& instance,
                    const FeasibilityRules& rules);

// Overtime of a duty. Operating drivers: working time beyond their original
// duty's working time. Standby drivers: minutes outside the shift window.
int overtime_minutes(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                     const Instance& instance, const FeasibilityRules& rules);

// Checks one driver's entry list against all restriction families. When
// several families are violated the reported one is the first in enum order.
// An empty entry list is feasible for any driver.
FeasibilityVerdict check_duty(const std::vector<AssignmentEntry>& entries, const Driver& driver,
                              const Instance& instance, const FeasibilityRules& rules);

// End-to-end validator: per-driver duty checks, deadhead coverage (every
// ridden task must be driven by another driver), and the task partition
// property. Violations are data, not errors; schedule-level findings use
// driver id -1.
std::vector<std::pair<int, FeasibilityVerdict>> validate_schedule(const Schedule& s,
                                                                  const Instance& instance);

}  // namespace crew

#endif  // CREW_FEASIBILITY_HPP
