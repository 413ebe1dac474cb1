#ifndef CREW_INSTANCES_HPP
#define CREW_INSTANCES_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "crew/model.hpp"

namespace crew {

// Hub-and-spoke service network: every line begins at one shared hub station
// and runs out to its own terminus. Stations are depots; tasks are train runs
// between handover stations on one line.
struct NetworkSpec {
  int n_lines = 5;
  std::vector<int> stations_per_line = {5, 5, 5, 5, 4};  // per line, hub included
  std::vector<int> swap_stations;  // handover stations; empty means all
  int line_minutes_min = 60;       // end-to-end travel time range per line
  int line_minutes_max = 180;
};

struct ScenarioSpec {
  int n_operating = 1;
  int n_standby = 0;
  int n_absent = 0;  // carried along for sweep drivers; generate() only validates it
  std::uint64_t seed = 0;
  std::string name = "synthetic";
};

// Builds a synthetic instance: a timetable of tasks along the lines, one
// feasible original duty per operating driver (a closed walk from the
// driver's home depot, breaks inserted where the working time demands one),
// and standby drivers drawn from three shift templates. Deterministic in
// (network, scenario, rules). Throws InputError on malformed specs and
// GenerationError when bounded retries cannot produce a feasible duty.
Instance generate(const NetworkSpec& network, const ScenarioSpec& scenario,
                  const FeasibilityRules& rules = {});

// Uniform sample without replacement over the operating drivers, seeded.
// Throws InputError when n_absent is negative or exceeds the operating count.
std::set<int> sample_absent(const Instance& instance, int n_absent, std::uint64_t seed);

}  // namespace crew

#endif  // CREW_INSTANCES_HPP
