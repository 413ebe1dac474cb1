#ifndef CREW_IO_HPP
#define CREW_IO_HPP

#include <cstdint>
#include <string>

#include "crew/colgen.hpp"
#include "crew/duties.hpp"
#include "crew/model.hpp"
#include "crew/objective.hpp"
#include "crew/tabu.hpp"
#include "json.hpp"

namespace crew {

// All JSON written by the toolkit is canonical: keys sorted (nlohmann's
// default object ordering), two-space indent, trailing newline. parse of a
// canonical document followed by dump reproduces it byte for byte, which is
// what makes repeated runs diffable.
std::string dump_canonical(const nlohmann::json& j);

nlohmann::json instance_to_json(const Instance& ins);
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);

nlohmann::json objective_to_json(const ObjectiveBreakdown& b);

// Trace rows as single-line JSON objects (NDJSON). CG rows carry wall time
// only when `with_timing`; search rows never contain timing.
nlohmann::json tabu_trace_json(const TraceRow& row);
nlohmann::json cg_trace_json(const CgTraceRow& row, bool with_timing);

// File plumbing. Loaders throw InputError on unreadable files, malformed
// JSON, or schema mismatches; instance loading also runs Instance::validate.
std::string load_text(const std::string& path);
void save_text(const std::string& path, const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& ins);
Schedule load_schedule(const std::string& path);
void save_schedule(const std::string& path, const Schedule& s);

// Duty-pool dump: little-endian binary framing
//   "CREWPOOL" | u32 version | u32 max_tasks | u64 compatibility hash |
//   u64 n_duties | { u32 len, len * i32 task ids } ...
// The hash binds the dump to (tasks, rules, max_tasks); load_pool recomputes
// it from the instance and refuses mismatches, then rebuilds stats and the
// per-driver index.
void save_pool(const std::string& path, const DutyPool& pool, const Instance& ins, int max_tasks);
DutyPool load_pool(const std::string& path, const Instance& ins, int* max_tasks_out = nullptr);

}  // namespace crew

#endif  // CREW_IO_HPP
