#ifndef CREW_MODEL_HPP
#define CREW_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace crew {

// All times are integer minutes since 00:00 of the scheduling day.
// The horizon is two days so shifts may cross midnight.
constexpr int kHorizonMinutes = 2880;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InstanceError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};
struct GenerationError : Error {
  using Error::Error;
};
struct BudgetError : Error {
  using Error::Error;
};
struct TimeLimitError : Error {
  using Error::Error;
};
struct NoNeighborError : Error {
  using Error::Error;
};

struct Depot {
  int id = -1;
  std::string name;
  friend bool operator==(const Depot&, const Depot&) = default;
};

// A license is a pair of bitsets: geographical regions and vehicle types.
// A driver license covers a task requirement iff both bitsets are supersets.
struct LicenseClass {
  std::uint64_t regions = 0;
  std::uint64_t vehicles = 0;

  bool covers(const LicenseClass& need) const {
    return (regions & need.regions) == need.regions &&
           (vehicles & need.vehicles) == need.vehicles;
  }
  friend bool operator==(const LicenseClass&, const LicenseClass&) = default;
};

// Atomic train-driving movement between two depots.
struct Task {
  int id = -1;
  int start_depot = -1;
  int end_depot = -1;
  int start_time = 0;
  int end_time = 0;
  LicenseClass required_license;
  int train_id = -1;  // physical train run; a deadheading driver rides it

  int duration() const { return end_time - start_time; }
  friend bool operator==(const Task&, const Task&) = default;
};

enum class DriverKind { Operating, Standby, Shadow };

struct Driver {
  int id = -1;
  DriverKind kind = DriverKind::Operating;
  int home_depot = -1;
  int shift_start = 0;  // earliest start (converted rest rule)
  int shift_end = 0;    // latest regular end
  LicenseClass license;
  std::vector<int> original_tasks;  // empty for standby drivers
  bool relocated = false;           // original duty does not start/end at home
  friend bool operator==(const Driver&, const Driver&) = default;
};

enum class AssignMode { Drive, Deadhead };

struct AssignmentEntry {
  int task = -1;
  AssignMode mode = AssignMode::Drive;
  friend bool operator==(const AssignmentEntry&, const AssignmentEntry&) = default;
};

// Weights of the schedule objective. Bucket edges are the upper-inclusive
// minute thresholds separating the per-driver overtime counts.
struct ObjectiveWeights {
  double alpha = 0.96;    // per unassigned task
  double beta4 = 0.004;   // drivers with overtime > bucket3
  double beta3 = 0.003;   // drivers with overtime in (bucket2, bucket3]
  double beta2 = 0.002;   // drivers with overtime in (bucket1, bucket2]
  double beta1 = 0.001;   // drivers with overtime in (0, bucket1]
  double gamma2 = 0.008;  // operating overtime, per hour
  double gamma1 = 0.002;  // standby overtime, per hour
  double lambda = 0.01;   // per changed duty
  int bucket1 = 60;
  int bucket2 = 120;
  int bucket3 = 180;
  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

struct FeasibilityRules {
  int min_transfer_minutes = 10;    // gap between consecutive tasks
  int break_threshold_minutes = 300;  // work beyond this needs a break
  int min_break_minutes = 60;       // a gap this long counts as a break
  int max_overtime_minutes = 240;   // cap on overtime per driver
  int max_tasks_per_duty = 9;
  bool deadhead_needs_license = false;
  friend bool operator==(const FeasibilityRules&, const FeasibilityRules&) = default;
};

struct Instance {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Depot> depots;
  std::vector<Task> tasks;      // id == index
  std::vector<Driver> drivers;  // id == index; never contains a Shadow driver
  ObjectiveWeights weights;
  FeasibilityRules rules;

  const Task& task(int id) const;
  const Driver& driver(int id) const;
  std::vector<int> operating_ids() const;

  // Throws InstanceError on dangling references, duplicate depot names,
  // out-of-range times, unordered original duties, or a Shadow driver.
  void validate() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Full assignment state: per-driver ordered entry lists plus the pool of
// unassigned tasks. Every instance task is either driven by exactly one
// driver or sits in `unassigned`.
struct Schedule {
  std::map<int, std::vector<AssignmentEntry>> assignments;
  std::set<int> unassigned;
  std::string instance_ref;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Ordered feasible task sequence for one day; a column of the set-covering
// model. `envelope` indexes the driver-equivalence class it was checked for.
struct Duty {
  std::vector<AssignmentEntry> entries;
  int envelope = -1;
};

// Builds the day-of-operation starting point: non-absent drivers keep their
// original duties, all tasks of absent drivers become unassigned, absent
// drivers disappear from the assignment map.
Schedule schedule_from_instance(const Instance& instance, const std::set<int>& absent);

// Order-insensitive over drivers, order-sensitive within entry lists, stable
// across processes. Commutative mixing so solvers can update it incrementally.
std::uint64_t schedule_fingerprint(const Schedule& s);

// Mixing helpers shared by the incremental fingerprint maintenance in the
// tabu solver. fingerprint == sum of driver_lane_hash over assignments plus
// unassigned_task_hash over the pool.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t entry_list_hash(const std::vector<AssignmentEntry>& entries);
std::uint64_t driver_lane_hash(int driver_id, const std::vector<AssignmentEntry>& entries);
std::uint64_t unassigned_task_hash(int task_id);

}  // namespace crew

#endif  // CREW_MODEL_HPP
