#ifndef CREW_TABU_HPP
#define CREW_TABU_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crew/model.hpp"
#include "crew/objective.hpp"

namespace crew {

struct TabuConfig {
  int max_iterations = 1000;
  int tabu_tenure = 50;        // iterations a visited schedule stays blocked
  int max_task_failures = 10;  // failed attempts before a task is shelved
  int m_diff = 2;              // max(#tasks unassigned - #tasks assigned) per move
  int max_deadhead_chain = 3;  // longest ride over consecutive tasks
  std::uint64_t rng_seed = 0;
  // As printed, the search only leaves the incumbent on improvement. This
  // flag enables classical drift: move to the best neighbor even when it is
  // worse than the historical best.
  bool always_move = false;
};

// Fingerprints of visited schedules keyed to the iteration that stored them.
// A fingerprint stored at iteration i blocks candidates during iterations
// (i, i + tenure] and becomes eligible again afterward.
struct TabuList {
  std::map<std::uint64_t, int> entries;

  bool is_tabu(std::uint64_t fingerprint, int iteration, int tenure) const;
  void update(std::uint64_t fingerprint, int iteration, int tenure);
};

// What a candidate move does to the target driver's duty. `removed` lists
// only driven tasks returned to the pool; dropped rides do not unassign
// anything. The extra slots name the bridge type used on each side of the
// selected task: none | deadhead | chain | unassigned.
struct MoveSummary {
  int target_driver = -1;
  std::vector<int> inserted;
  std::vector<int> removed;
  std::string extra_front = "none";
  std::string extra_back = "none";
  friend bool operator==(const MoveSummary&, const MoveSummary&) = default;
};

struct Neighbor {
  Schedule schedule;
  std::uint64_t fingerprint = 0;
  MoveSummary move;
  ObjectiveBreakdown objective;
};

struct TraceRow {
  int iteration = 0;
  int selected_task = -1;
  int neighborhood = 0;  // candidates surviving feasibility, tabu and dedup
  bool accepted = false;
  double objective = 0.0;       // current schedule's objective after the iteration
  double best_objective = 0.0;  // historical best after the iteration
  int unassigned = 0;
  MoveSummary move;  // meaningful when the schedule moved this iteration
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct TabuResult {
  Schedule best;
  ObjectiveBreakdown best_objective;
  std::vector<TraceRow> trace;
  std::string termination;  // max_iterations | pool_empty | all_tasks_failed
  int iterations = 0;
};

// All feasible, non-tabu schedules reachable by assigning `task_id` to some
// driver: direct insertions plus the four bridge types on both sides, with
// conflicting tasks of the target driver returned to the pool when the net
// loss stays within m_diff.
std::vector<Neighbor> neighbors(const Schedule& s, int task_id, const Instance& instance,
                                const TabuConfig& config, const TabuList& tabu, int iteration);

// Minimal objective total; ties broken by fewest removed tasks, lowest
// target driver id, then lowest inserted-task ids. Throws NoNeighborError
// on an empty list.
const Neighbor& select_best(const std::vector<Neighbor>& candidates);

// Runs the search from schedule_from_instance(instance, absent) and returns
// the historical best plus a per-iteration trace. The callback sees each
// iteration's row and the current schedule after the move. Deterministic in
// (instance, absent, config).
TabuResult solve_tabu(const Instance& instance, const std::set<int>& absent,
                      const TabuConfig& config,
                      const std::function<void(const TraceRow&, const Schedule&)>& on_iteration = {});

}  // namespace crew

#endif  // CREW_TABU_HPP
