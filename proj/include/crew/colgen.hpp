#ifndef CREW_COLGEN_HPP
#define CREW_COLGEN_HPP

#include <map>
#include <set>
#include <vector>

#include "crew/duties.hpp"
#include "crew/lp.hpp"
#include "crew/model.hpp"
#include "crew/objective.hpp"

namespace crew {

// One master column. Duty columns pair a pool duty with an available driver;
// the per-driver empty column has duty_index -1; cancellation columns cover
// a single task at cost alpha and belong to no driver.
struct MasterColumn {
  int duty_index = -1;
  int driver_id = -1;
  int shadow_task = -1;
  double cost = 0.0;
};

// Restricted master: one covering row (>= 1) per task, one convexity row
// (= 1) per available driver. Always LP-feasible: cancellation columns
// satisfy covering, the empty column satisfies convexity.
struct MasterModel {
  LinearProgram lp;
  std::vector<MasterColumn> columns;       // parallel to lp columns
  std::vector<int> task_row;               // task id -> covering row
  std::map<int, int> convexity_row;        // available driver id -> row
  std::set<std::pair<int, int>> present;   // (duty_index, driver_id) already added

  void add_duty_column(const DutyPool& pool, int duty_index, int driver_id,
                       const Instance& instance);
};

// Initial columns: every available driver's original duty, the empty column
// per driver, and one cancellation column per task.
MasterModel build_master(const Instance& instance, const std::set<int>& absent,
                         const DutyPool& pool);

struct MasterDuals {
  std::vector<double> lambda;   // per task, from the covering rows
  std::map<int, double> mu;     // per available driver, from the convexity rows
};

MasterDuals extract_duals(const MasterModel& master, const LpSolution& sol);

// Cost of assigning pool duty `duty_index` to `driver`: overtime bucket and
// hours plus the change penalty (same costing the objective module applies
// to a realized lane).
double column_cost(const DutyPool& pool, int duty_index, const Driver& driver,
                   const Instance& instance);

// c_{duty,driver} minus the covering duals of the duty's tasks minus the
// driver's convexity dual.
double reduced_cost(const DutyPool& pool, int duty_index, const Driver& driver,
                    const MasterDuals& duals, const Instance& instance);

struct PricedColumn {
  int duty_index = -1;
  int driver_id = -1;
  double rc = 0.0;
};

// Up to k columns with reduced cost < -tol that are not yet in the master,
// most negative first; ties fall to the lower driver id, then duty index.
// An empty result signals convergence.
std::vector<PricedColumn> price(const DutyPool& pool, const MasterModel& master,
                                const MasterDuals& duals, int k, const Instance& instance,
                                double tol);

struct CgConfig {
  double time_limit_seconds = 1800.0;  // the half-hour preset; 43200 for the long one
  int k = 50;                          // columns added per pricing round
  Tolerances tol;
  long lp_iteration_limit = 2000000;
  long ilp_node_limit = 200000;
};

// Column management: rebuild the master keeping the structural columns
// (cancellation + empty duty), every column in the support of `sol`, and
// duty columns whose reduced cost under `duals` stays <= keep_tol. Dropped
// pairs leave `present`, so pricing can bring them back later. The support
// is kept whole, hence the master optimum is unchanged and the master-value
// trace stays non-increasing.
void shrink_master(MasterModel& master, const LpSolution& sol, const MasterDuals& duals,
                   const DutyPool& pool, const Instance& instance, double keep_tol);

struct CgState {
  int iteration = 0;
  double master_obj = 0.0;
  MasterDuals duals;
  int columns_added_total = 0;
  double wall_time_used = 0.0;
};

struct CgTraceRow {
  int iteration = 0;
  double master_obj = 0.0;
  int n_columns = 0;
  double wall_time = 0.0;
};

struct CgResult {
  Schedule schedule;
  ObjectiveBreakdown objective;  // evaluate(schedule)
  CgState state;
  double lp_bound = 0.0;         // final master LP value
  std::vector<CgTraceRow> trace;
  double ilp_objective = 0.0;
  long ilp_nodes = 0;
  bool time_limited = false;     // pricing stopped by the clock, not convergence
  bool stalled = false;          // a master re-solve hit its pivot budget; the
                                 // bound is the last clean master value
};

// Column-generation benchmark: price-and-solve loop over the enumerated
// pool, then a branch-and-bound finish over the collected columns, decoded
// into a schedule (cancellation columns become unassigned tasks; an
// over-covered task stays driven on the cheapest selected duty and is
// demoted to a ride elsewhere). Throws TimeLimitError when the limit
// expires before the first master solve.
CgResult solve_cg(const Instance& instance, const std::set<int>& absent, const DutyPool& pool,
                  const CgConfig& config = {});

}  // namespace crew

#endif  // CREW_COLGEN_HPP
