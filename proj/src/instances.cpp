#include "crew/instances.hpp"

#include <algorithm>
#include <random>
#include <utility>

#include "crew/feasibility.hpp"

namespace crew {

namespace {

constexpr int kHopCapMinutes = 75;  // longest single task the walks emit
constexpr int kWalkAttempts = 200;  // per-driver retries before giving up
constexpr int kShiftTemplates[3][2] = {{300, 840}, {600, 1140}, {840, 1380}};

int pick(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

struct Network {
  int n_stations = 0;
  std::vector<int> segment_minutes;                 // per line
  std::vector<std::vector<int>> line_stations;      // station ids, hub first
  std::vector<std::vector<std::pair<int, int>>> at; // station -> (line, position)
  std::vector<char> swap_ok;
  std::vector<int> swap_ids;
};

Network build_network(const NetworkSpec& spec, std::mt19937_64& rng) {
  if (spec.n_lines < 1) throw InputError("network needs at least one line");
  if (static_cast<int>(spec.stations_per_line.size()) != spec.n_lines)
    throw InputError("stations_per_line length must equal n_lines");
  if (spec.line_minutes_min < 1 || spec.line_minutes_max < spec.line_minutes_min)
    throw InputError("line travel time range is empty");

  Network net;
  net.n_stations = 1;  // station 0 is the hub shared by all lines
  net.line_stations.resize(spec.n_lines);
  net.segment_minutes.resize(spec.n_lines);
  for (int l = 0; l < spec.n_lines; ++l) {
    int len = spec.stations_per_line[l];
    if (len < 2) throw InputError("every line needs the hub plus one station");
    net.line_stations[l].push_back(0);
    for (int k = 1; k < len; ++k) net.line_stations[l].push_back(net.n_stations++);
    int end_to_end = pick(rng, spec.line_minutes_min, spec.line_minutes_max);
    net.segment_minutes[l] = std::max(1, end_to_end / (len - 1));
  }
  net.at.resize(net.n_stations);
  for (int l = 0; l < spec.n_lines; ++l)
    for (int p = 0; p < static_cast<int>(net.line_stations[l].size()); ++p)
      net.at[net.line_stations[l][p]].emplace_back(l, p);

  net.swap_ok.assign(net.n_stations, spec.swap_stations.empty() ? 1 : 0);
  for (int s : spec.swap_stations) {
    if (s < 0 || s >= net.n_stations) throw InputError("swap station out of range");
    net.swap_ok[s] = 1;
  }
  if (!net.swap_ok[0]) throw InputError("the hub must be a handover station");
  for (int s = 0; s < net.n_stations; ++s)
    if (net.swap_ok[s]) net.swap_ids.push_back(s);
  return net;
}

struct Hop {
  int to = -1;
  int line = -1;
  int minutes = 0;
};

std::vector<Hop> hops_from(const Network& net, int cur) {
  std::vector<Hop> out;
  for (auto [l, p] : net.at[cur])
    for (int q = 0; q < static_cast<int>(net.line_stations[l].size()); ++q) {
      int to = net.line_stations[l][q];
      if (to == cur || !net.swap_ok[to]) continue;
      int minutes = std::abs(q - p) * net.segment_minutes[l];
      if (minutes <= kHopCapMinutes) out.push_back({to, l, minutes});
    }
  return out;
}

// Shortest same-line run between two stations, -1 when no line joins them.
int direct_minutes(const Network& net, int a, int b) {
  for (auto [l, p] : net.at[a])
    for (auto [l2, q] : net.at[b])
      if (l == l2) return std::abs(q - p) * net.segment_minutes[l];
  return -1;
}

struct WalkTask {
  int from = -1, to = -1, start = 0, end = 0, line = -1;
};

// One attempt at a closed chronological walk of exactly n_tasks hops from
// `home`. The last two hops are steered so the walk can always close; a dwell
// is widened into a break before the working time could cross the threshold.
// Returns an empty vector on a dead end.
std::vector<WalkTask> try_walk(const Network& net, std::mt19937_64& rng, int home,
                               int shift_start, int shift_end, int n_tasks,
                               const FeasibilityRules& rules) {
  std::vector<WalkTask> walk;
  int cur = home;
  int t = shift_start + pick(rng, 0, 30);
  int first_start = 0;
  int break_gap_sum = 0;
  bool has_break = false;
  for (int i = 0; i < n_tasks; ++i) {
    int remaining = n_tasks - i;
    if (i > 0) {
      int dwell = pick(rng, rules.min_transfer_minutes, rules.min_transfer_minutes + 15);
      // worst-case working time if one more capped hop follows this dwell
      int projected = (t + dwell + kHopCapMinutes - first_start) - break_gap_sum;
      if (!has_break && projected > rules.break_threshold_minutes) {
        dwell = rules.min_break_minutes + pick(rng, 5, 20);
        has_break = true;
        break_gap_sum += dwell;
      }
      t += dwell;
    }
    auto cands = hops_from(net, cur);
    std::vector<Hop> ok;
    for (const Hop& h : cands) {
      if (t + h.minutes > shift_end) continue;
      if (remaining == 1) {
        if (h.to != home) continue;
      } else if (remaining == 2) {
        int back = h.to == home ? -1 : direct_minutes(net, h.to, home);
        if (back < 0 || back > kHopCapMinutes) continue;
      }
      ok.push_back(h);
    }
    if (ok.empty()) return {};
    const Hop& h = ok[pick(rng, 0, static_cast<int>(ok.size()) - 1)];
    if (i == 0) first_start = t;
    walk.push_back({cur, h.to, t, t + h.minutes, h.line});
    cur = h.to;
    t = walk.back().end;
  }
  return walk;
}

LicenseClass line_license(int line) {
  return {1ull << (line % 3), 1ull << (line % 2)};
}

}  // namespace

Instance generate(const NetworkSpec& network, const ScenarioSpec& scenario,
                  const FeasibilityRules& rules) {
  if (scenario.n_operating < 0 || scenario.n_standby < 0 || scenario.n_absent < 0)
    throw InputError("scenario counts must be non-negative");
  if (scenario.n_absent > scenario.n_operating)
    throw InputError("more absent drivers than operating drivers");

  std::mt19937_64 rng(scenario.seed);
  Network net = build_network(network, rng);

  Instance ins;
  ins.name = scenario.name;
  ins.seed = scenario.seed;
  ins.rules = rules;
  ins.depots.reserve(net.n_stations);
  for (int s = 0; s < net.n_stations; ++s)
    ins.depots.push_back({s, s == 0 ? "HUB" : "S" + std::to_string(s)});

  struct Pending {
    WalkTask wt;
    int owner = -1;
    int hop = -1;
  };
  std::vector<Pending> pending;

  for (int d = 0; d < scenario.n_operating; ++d) {
    std::vector<WalkTask> walk;
    int shift_start = 0, shift_end = 0;
    for (int attempt = 0; attempt < kWalkAttempts && walk.empty(); ++attempt) {
      const int* tmpl = kShiftTemplates[pick(rng, 0, 2)];
      shift_start = tmpl[0];
      shift_end = tmpl[1];
      int home = net.swap_ids[pick(rng, 0, static_cast<int>(net.swap_ids.size()) - 1)];
      int r = pick(rng, 0, 99);
      int n_tasks = r < 25 ? 4 : r < 65 ? 5 : r < 90 ? 6 : 7;
      walk = try_walk(net, rng, home, shift_start, shift_end, n_tasks, rules);
    }
    if (walk.empty())
      throw GenerationError("no feasible duty for driver " + std::to_string(d) +
                            " within the retry budget");

    Driver drv;
    drv.id = d;
    drv.kind = DriverKind::Operating;
    drv.home_depot = walk.front().from;
    drv.shift_start = shift_start;
    drv.shift_end = shift_end;
    for (const WalkTask& wt : walk) {
      LicenseClass need = line_license(wt.line);
      drv.license.regions |= need.regions;
      drv.license.vehicles |= need.vehicles;
    }
    // extra qualifications so drivers can substitute on foreign lines
    if (pick(rng, 0, 99) < 50) drv.license.regions |= 1ull << pick(rng, 0, 2);
    if (pick(rng, 0, 99) < 50) drv.license.vehicles |= 1ull << pick(rng, 0, 1);
    ins.drivers.push_back(drv);

    for (int hop = 0; hop < static_cast<int>(walk.size()); ++hop)
      pending.push_back({walk[hop], d, hop});
  }

  for (int k = 0; k < scenario.n_standby; ++k) {
    Driver drv;
    drv.id = scenario.n_operating + k;
    drv.kind = DriverKind::Standby;
    drv.home_depot = pick(rng, 0, 99) < 70
                         ? 0
                         : net.swap_ids[pick(rng, 0, static_cast<int>(net.swap_ids.size()) - 1)];
    const int* tmpl = kShiftTemplates[pick(rng, 0, 2)];
    drv.shift_start = tmpl[0];
    drv.shift_end = tmpl[1];
    drv.license = {0x7ull, 0x3ull};  // all regions and vehicle classes in use
    ins.drivers.push_back(drv);
  }

  std::vector<int> order(pending.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Pending& pa = pending[a];
    const Pending& pb = pending[b];
    auto ka = std::tuple(pa.wt.start, pa.wt.end, pa.wt.from, pa.wt.to, pa.owner, pa.hop);
    auto kb = std::tuple(pb.wt.start, pb.wt.end, pb.wt.from, pb.wt.to, pb.owner, pb.hop);
    return ka < kb;
  });

  ins.tasks.reserve(pending.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Pending& p = pending[order[i]];
    Task t;
    t.id = static_cast<int>(i);
    t.start_depot = p.wt.from;
    t.end_depot = p.wt.to;
    t.start_time = p.wt.start;
    t.end_time = p.wt.end;
    t.required_license = line_license(p.wt.line);
    t.train_id = p.owner * 100 + p.hop;
    ins.tasks.push_back(t);
    ins.drivers[p.owner].original_tasks.push_back(t.id);
  }
  // walks are chronological, so per-driver ids arrive in duty order already;
  // sort anyway to keep the invariant independent of tie-break details
  for (Driver& d : ins.drivers)
    std::sort(d.original_tasks.begin(), d.original_tasks.end(), [&](int a, int b) {
      return ins.tasks[a].start_time != ins.tasks[b].start_time
                 ? ins.tasks[a].start_time < ins.tasks[b].start_time
                 : a < b;
    });

  ins.validate();
  Schedule original = schedule_from_instance(ins, {});
  if (!validate_schedule(original, ins).empty())
    throw GenerationError("generated original schedule is not violation-free");
  return ins;
}

std::set<int> sample_absent(const Instance& instance, int n_absent, std::uint64_t seed) {
  std::vector<int> ids = instance.operating_ids();
  if (n_absent < 0 || n_absent > static_cast<int>(ids.size()))
    throw InputError("absent count out of range");
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n_absent; ++i) {
    int j = i + pick(rng, 0, static_cast<int>(ids.size()) - 1 - i);
    std::swap(ids[i], ids[j]);
  }
  return std::set<int>(ids.begin(), ids.begin() + n_absent);
}

}  // namespace crew
