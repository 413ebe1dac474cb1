#include "crew/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "crew/feasibility.hpp"

namespace crew {

namespace {

using nlohmann::json;

json license_to_json(const LicenseClass& lc) {
  return json{{"regions", lc.regions}, {"vehicles", lc.vehicles}};
}

LicenseClass license_from_json(const json& j) {
  return {j.at("regions").get<std::uint64_t>(), j.at("vehicles").get<std::uint64_t>()};
}

const char* kind_name(DriverKind k) {
  switch (k) {
    case DriverKind::Operating: return "operating";
    case DriverKind::Standby: return "standby";
    case DriverKind::Shadow: return "shadow";
  }
  return "?";
}

DriverKind kind_from_name(const std::string& s) {
  if (s == "operating") return DriverKind::Operating;
  if (s == "standby") return DriverKind::Standby;
  if (s == "shadow") return DriverKind::Shadow;
  throw InputError("unknown driver kind '" + s + "'");
}

AssignMode mode_from_name(const std::string& s) {
  if (s == "drive") return AssignMode::Drive;
  if (s == "ride") return AssignMode::Deadhead;
  throw InputError("unknown assignment mode '" + s + "'");
}

json rules_to_json(const FeasibilityRules& r) {
  return json{{"break_threshold", r.break_threshold_minutes},
              {"deadhead_needs_license", r.deadhead_needs_license},
              {"max_overtime", r.max_overtime_minutes},
              {"max_tasks_per_duty", r.max_tasks_per_duty},
              {"min_break", r.min_break_minutes},
              {"min_transfer", r.min_transfer_minutes}};
}

FeasibilityRules rules_from_json(const json& j) {
  FeasibilityRules r;
  r.break_threshold_minutes = j.at("break_threshold").get<int>();
  r.deadhead_needs_license = j.at("deadhead_needs_license").get<bool>();
  r.max_overtime_minutes = j.at("max_overtime").get<int>();
  r.max_tasks_per_duty = j.at("max_tasks_per_duty").get<int>();
  r.min_break_minutes = j.at("min_break").get<int>();
  r.min_transfer_minutes = j.at("min_transfer").get<int>();
  return r;
}

json weights_to_json(const ObjectiveWeights& w) {
  return json{{"alpha", w.alpha},     {"beta1", w.beta1},     {"beta2", w.beta2},
              {"beta3", w.beta3},     {"beta4", w.beta4},     {"bucket1", w.bucket1},
              {"bucket2", w.bucket2}, {"bucket3", w.bucket3}, {"gamma1", w.gamma1},
              {"gamma2", w.gamma2},   {"lambda", w.lambda}};
}

ObjectiveWeights weights_from_json(const json& j) {
  ObjectiveWeights w;
  w.alpha = j.at("alpha").get<double>();
  w.beta1 = j.at("beta1").get<double>();
  w.beta2 = j.at("beta2").get<double>();
  w.beta3 = j.at("beta3").get<double>();
  w.beta4 = j.at("beta4").get<double>();
  w.bucket1 = j.at("bucket1").get<int>();
  w.bucket2 = j.at("bucket2").get<int>();
  w.bucket3 = j.at("bucket3").get<int>();
  w.gamma1 = j.at("gamma1").get<double>();
  w.gamma2 = j.at("gamma2").get<double>();
  w.lambda = j.at("lambda").get<double>();
  return w;
}

// Fixed-width little-endian writes keep the pool dump portable.
template <class T>
void put(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw InputError("pool dump is truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

constexpr char kPoolMagic[8] = {'C', 'R', 'E', 'W', 'P', 'O', 'O', 'L'};
constexpr std::uint32_t kPoolVersion = 1;

}  // namespace

std::string dump_canonical(const nlohmann::json& j) { return j.dump(2) + "\n"; }

json instance_to_json(const Instance& ins) {
  json depots = json::array();
  for (const Depot& d : ins.depots) depots.push_back({{"id", d.id}, {"name", d.name}});

  json tasks = json::array();
  for (const Task& t : ins.tasks)
    tasks.push_back({{"end", t.end_time},
                     {"from", t.start_depot},
                     {"id", t.id},
                     {"license", license_to_json(t.required_license)},
                     {"start", t.start_time},
                     {"to", t.end_depot},
                     {"train", t.train_id}});

  json drivers = json::array();
  for (const Driver& d : ins.drivers)
    drivers.push_back({{"duty", d.original_tasks},
                       {"home", d.home_depot},
                       {"id", d.id},
                       {"kind", kind_name(d.kind)},
                       {"license", license_to_json(d.license)},
                       {"relocated", d.relocated},
                       {"shift", json::array({d.shift_start, d.shift_end})}});

  return json{{"depots", depots},
              {"drivers", drivers},
              {"meta", json{{"name", ins.name}, {"rules", rules_to_json(ins.rules)},
                            {"seed", ins.seed}}},
              {"tasks", tasks},
              {"weights", weights_to_json(ins.weights)}};
}

Instance instance_from_json(const json& j) {
  Instance ins;
  try {
    const json& meta = j.at("meta");
    ins.name = meta.at("name").get<std::string>();
    ins.seed = meta.at("seed").get<std::uint64_t>();
    ins.rules = rules_from_json(meta.at("rules"));
    ins.weights = weights_from_json(j.at("weights"));
    for (const json& d : j.at("depots"))
      ins.depots.push_back({d.at("id").get<int>(), d.at("name").get<std::string>()});
    for (const json& t : j.at("tasks")) {
      Task task;
      task.id = t.at("id").get<int>();
      task.start_depot = t.at("from").get<int>();
      task.end_depot = t.at("to").get<int>();
      task.start_time = t.at("start").get<int>();
      task.end_time = t.at("end").get<int>();
      task.required_license = license_from_json(t.at("license"));
      task.train_id = t.at("train").get<int>();
      ins.tasks.push_back(task);
    }
    for (const json& d : j.at("drivers")) {
      Driver drv;
      drv.id = d.at("id").get<int>();
      drv.kind = kind_from_name(d.at("kind").get<std::string>());
      drv.home_depot = d.at("home").get<int>();
      const json& shift = d.at("shift");
      if (!shift.is_array() || shift.size() != 2)
        throw InputError("driver shift must be [start, end]");
      drv.shift_start = shift[0].get<int>();
      drv.shift_end = shift[1].get<int>();
      drv.license = license_from_json(d.at("license"));
      drv.original_tasks = d.at("duty").get<std::vector<int>>();
      drv.relocated = d.at("relocated").get<bool>();
      ins.drivers.push_back(drv);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed instance document: ") + e.what());
  }
  std::sort(ins.depots.begin(), ins.depots.end(),
            [](const Depot& a, const Depot& b) { return a.id < b.id; });
  std::sort(ins.tasks.begin(), ins.tasks.end(),
            [](const Task& a, const Task& b) { return a.id < b.id; });
  std::sort(ins.drivers.begin(), ins.drivers.end(),
            [](const Driver& a, const Driver& b) { return a.id < b.id; });
  ins.validate();
  return ins;
}

json schedule_to_json(const Schedule& s) {
  json lanes = json::array();
  for (const auto& [did, entries] : s.assignments) {
    json lane = json::array();
    for (const AssignmentEntry& e : entries)
      lane.push_back({{"mode", e.mode == AssignMode::Drive ? "drive" : "ride"},
                      {"task", e.task}});
    lanes.push_back({{"driver", did}, {"entries", lane}});
  }
  return json{{"assignments", lanes},
              {"instance", s.instance_ref},
              {"unassigned", s.unassigned}};
}

Schedule schedule_from_json(const json& j) {
  Schedule s;
  try {
    s.instance_ref = j.at("instance").get<std::string>();
    for (const json& lane : j.at("assignments")) {
      int did = lane.at("driver").get<int>();
      if (s.assignments.count(did))
        throw InputError("driver " + std::to_string(did) + " appears in two lanes");
      std::vector<AssignmentEntry>& entries = s.assignments[did];
      for (const json& e : lane.at("entries"))
        entries.push_back(
            {e.at("task").get<int>(), mode_from_name(e.at("mode").get<std::string>())});
    }
    for (const json& t : j.at("unassigned")) s.unassigned.insert(t.get<int>());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed schedule document: ") + e.what());
  }
  return s;
}

json objective_to_json(const ObjectiveBreakdown& b) {
  return json{{"changed_count", b.changed_count},
              {"operating_overtime_hours", b.operating_overtime_hours},
              {"overtime_buckets", b.overtime_buckets},
              {"standby_overtime_hours", b.standby_overtime_hours},
              {"total", b.total},
              {"unassigned_count", b.unassigned_count}};
}

json tabu_trace_json(const TraceRow& row) {
  return json{{"accepted", row.accepted},
              {"best_objective", row.best_objective},
              {"iteration", row.iteration},
              {"move", json{{"driver", row.move.target_driver},
                            {"extra_back", row.move.extra_back},
                            {"extra_front", row.move.extra_front},
                            {"inserted", row.move.inserted},
                            {"removed", row.move.removed}}},
              {"neighborhood", row.neighborhood},
              {"objective", row.objective},
              {"selected_task", row.selected_task},
              {"unassigned", row.unassigned}};
}

json cg_trace_json(const CgTraceRow& row, bool with_timing) {
  json j{{"iteration", row.iteration},
         {"master_obj", row.master_obj},
         {"n_columns", row.n_columns}};
  if (with_timing) j["wall_time_s"] = row.wall_time;
  return j;
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw InputError("short write to '" + path + "'");
}

Instance load_instance(const std::string& path) {
  json j = json::parse(load_text(path), nullptr, false);
  if (j.is_discarded()) throw InputError("'" + path + "' is not valid JSON");
  return instance_from_json(j);
}

void save_instance(const std::string& path, const Instance& ins) {
  save_text(path, dump_canonical(instance_to_json(ins)));
}

Schedule load_schedule(const std::string& path) {
  json j = json::parse(load_text(path), nullptr, false);
  if (j.is_discarded()) throw InputError("'" + path + "' is not valid JSON");
  return schedule_from_json(j);
}

void save_schedule(const std::string& path, const Schedule& s) {
  save_text(path, dump_canonical(schedule_to_json(s)));
}

void save_pool(const std::string& path, const DutyPool& pool, const Instance& ins,
               int max_tasks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(kPoolMagic, sizeof(kPoolMagic));
  put<std::uint32_t>(out, kPoolVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(max_tasks));
  put<std::uint64_t>(out, pool_compatibility_hash(ins.tasks, ins.rules, max_tasks));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(pool.duties.size()));
  for (const std::vector<int>& duty : pool.duties) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(duty.size()));
    for (int tid : duty) put<std::uint32_t>(out, static_cast<std::uint32_t>(tid));
  }
  if (!out.flush()) throw InputError("short write to '" + path + "'");
}

DutyPool load_pool(const std::string& path, const Instance& ins, int* max_tasks_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kPoolMagic, sizeof(magic)) != 0)
    throw InputError("'" + path + "' is not a duty-pool dump");
  std::uint32_t version = get<std::uint32_t>(in);
  if (version != kPoolVersion)
    throw InputError("pool dump version " + std::to_string(version) + " is not supported");
  int max_tasks = static_cast<int>(get<std::uint32_t>(in));
  std::uint64_t hash = get<std::uint64_t>(in);
  if (hash != pool_compatibility_hash(ins.tasks, ins.rules, max_tasks))
    throw InputError("pool dump was built from different tasks or rules than '" + ins.name +
                     "'");
  std::uint64_t n = get<std::uint64_t>(in);

  DutyPool pool;
  pool.duties.reserve(n);
  pool.stats.reserve(n);
  const int n_tasks = static_cast<int>(ins.tasks.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t len = get<std::uint32_t>(in);
    if (len == 0 || static_cast<int>(len) > max_tasks)
      throw InputError("pool dump holds a duty of invalid length");
    std::vector<int> duty(len);
    std::vector<AssignmentEntry> entries(len);
    for (std::uint32_t k = 0; k < len; ++k) {
      int tid = static_cast<int>(get<std::uint32_t>(in));
      if (tid < 0 || tid >= n_tasks) throw InputError("pool dump references unknown task");
      duty[k] = tid;
      entries[k] = {tid, AssignMode::Drive};
    }
    const Task& first = ins.task(duty.front());
    const Task& last = ins.task(duty.back());
    pool.stats.push_back({working_minutes(entries, ins, ins.rules), first.start_time,
                          last.end_time, first.start_depot, last.end_depot});
    pool.duties.push_back(std::move(duty));
  }
  build_driver_index(pool, ins, ins.rules);
  if (max_tasks_out) *max_tasks_out = max_tasks;
  return pool;
}

}  // namespace crew
