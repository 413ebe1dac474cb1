#ifndef CREW_DUTIES_HPP
#define CREW_DUTIES_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "crew/model.hpp"

namespace crew {

// Column pool for the set-covering benchmark: every feasible ordered task
// sequence up to the length cap, plus an index of which duties each driver
// may work.
struct DutyPool {
  // Task-id sequences, sorted lexicographically so indices are stable.
  std::vector<std::vector<int>> duties;
  // Per-duty stats so column costs are O(1): working minutes, first start,
  // last end, endpoint depots.
  struct DutyStats {
    int working_min = 0;
    int first_start = 0;
    int last_end = 0;
    int start_depot = -1;
    int end_depot = -1;
  };
  std::vector<DutyStats> stats;
  std::map<int, std::vector<int>> per_driver_index;  // driver id -> duty indices

  int size() const { return static_cast<int>(duties.size()); }
  std::vector<AssignmentEntry> entries(int duty_index) const;
};

// Enumerates every non-empty ordered task sequence of length <= max_tasks
// that passes the duty-level feasibility core (chronology with transfer
// gaps, depot chaining, break rule, length cap). The recursion descends only
// through prefixes that satisfy the prefix-monotone constraints and applies
// the break rule when a sequence is emitted, so no feasible duty is lost.
DutyPool enumerate_duties(std::span<const Task> tasks, const FeasibilityRules& rules,
                          int max_tasks);

// Fills pool.per_driver_index: duty j is listed for driver d iff the duty
// passes the full per-driver check (license, shift window, depot endpoints,
// overtime). Drivers sharing an envelope are evaluated once.
void build_driver_index(DutyPool& pool, const Instance& instance, const FeasibilityRules& rules);

struct DutyCount {
  std::uint64_t count = 0;
  std::uint64_t projected_bytes = 0;  // what materializing would allocate
};

// Same recursion in counting-only mode. Throws BudgetError once the
// projected materialization exceeds memory_budget_bytes.
DutyCount count_duties(std::span<const Task> tasks, const FeasibilityRules& rules, int max_tasks,
                       std::uint64_t memory_budget_bytes);

// Rules+task-set signature embedded in pool dumps so a pool is never reused
// against a different instance or rule set.
std::uint64_t pool_compatibility_hash(std::span<const Task> tasks, const FeasibilityRules& rules,
                                      int max_tasks);

}  // namespace crew

#endif  // CREW_DUTIES_HPP
