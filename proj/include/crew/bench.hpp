#ifndef CREW_BENCH_HPP
#define CREW_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace crew {

// One isolated child run: exit code, wall time, peak resident memory from
// the kernel's accounting (0 when the platform gives none), captured output.
struct RunResult {
  int exit_code = -1;
  double wall_seconds = 0.0;
  std::uint64_t peak_rss_bytes = 0;
  std::string out;
  std::string err;
};

// argv[0] must be the executable path. Throws Error when the process cannot
// be spawned at all; a failing child is reported through exit_code.
RunResult run_subprocess(const std::vector<std::string>& argv);

// Absolute path of the running binary (for self-reexec harness runs).
std::string self_exe_path();

// Peak resident memory of the current process so far, 0 if unavailable.
std::uint64_t peak_rss_self();

// The benchmark matrix: one instance, one absent set, `repeats` seeded
// heuristic runs and one column-generation run per time limit, every solver
// in its own child process so wall time and peak memory are isolated. The
// duty pool is materialized once and handed to the children as a dump so
// both approaches price against identical columns.
struct CompareSpec {
  std::string exe;            // CLI binary to spawn
  std::string instance_path;
  std::string workdir;        // artifacts directory, created if missing
  std::vector<int> absent;
  int repeats = 3;
  std::uint64_t seed = 0;     // heuristic run i uses seed + i
  int ts_iterations = 1000;
  std::vector<double> cg_time_limits = {1800.0};
  int threads = 1;
  bool timing = true;         // false propagates --no-timing to children
};

nlohmann::json run_compare(const CompareSpec& spec);

}  // namespace crew

#endif  // CREW_BENCH_HPP
