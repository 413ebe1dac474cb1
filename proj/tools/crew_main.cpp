#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crew/bench.hpp"
#include "crew/colgen.hpp"
#include "crew/duties.hpp"
#include "crew/feasibility.hpp"
#include "crew/gantt.hpp"
#include "crew/instances.hpp"
#include "crew/io.hpp"
#include "crew/objective.hpp"
#include "crew/tabu.hpp"

using nlohmann::json;
using namespace crew;

namespace {

std::vector<int> parse_id_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) {
      try {
        std::size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        out.push_back(v);
      } catch (const std::exception&) {
        throw InputError("'" + tok + "' is not a driver id");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void emit(const std::string& path, const json& j) {
  if (path.empty())
    std::fputs(dump_canonical(j).c_str(), stdout);
  else
    save_text(path, dump_canonical(j));
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// shared flags of the two solve subcommands
struct SolveArgs {
  std::string instance_path;
  std::string absent_list;
  bool absent_given = false;
  int sample_n = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  bool no_timing = false;
  std::string report_path, schedule_path, trace_path;
};

void add_solve_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--instance", a.instance_path, "instance JSON")->required();
  auto* absent = cmd->add_option("--absent", a.absent_list,
                                 "comma-separated absent driver ids ('' for none)");
  auto* sample = cmd->add_option("--sample", a.sample_n,
                                 "sample this many absent drivers (needs --seed)");
  absent->excludes(sample);
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--threads", a.threads, "worker threads (results are thread-count independent)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timing", a.no_timing, "omit wall time and memory from outputs");
  cmd->add_option("--report", a.report_path, "result report path (default: stdout)");
  cmd->add_option("--schedule-out", a.schedule_path, "write the new schedule here");
  cmd->add_option("--trace", a.trace_path, "write the NDJSON trace here");
}

std::set<int> resolve_absent(const SolveArgs& a, const Instance& ins) {
  if (a.absent_given) {
    std::vector<int> ids = parse_id_list(a.absent_list);
    return {ids.begin(), ids.end()};
  }
  if (a.sample_n >= 0) {
    if (!a.seed_given) throw InputError("--sample needs --seed");
    return sample_absent(ins, a.sample_n, a.seed);
  }
  throw InputError("one of --absent or --sample is required");
}

json solve_common_report(const Instance& ins, const std::set<int>& absent,
                         const Schedule& result) {
  Schedule initial = schedule_from_instance(ins, absent);
  int n0 = static_cast<int>(initial.unassigned.size());
  int nf = static_cast<int>(result.unassigned.size());
  double rate = n0 > 0 ? 1.0 - static_cast<double>(nf) / n0 : 1.0;
  return json{{"absent", std::vector<int>(absent.begin(), absent.end())},
              {"assignment_rate", rate},
              {"final_unassigned", nf},
              {"initial_unassigned", n0},
              {"instance", ins.name},
              {"objective", objective_to_json(evaluate(result, ins))}};
}

int cmd_solve_ts(const SolveArgs& a, const TabuConfig& cfg_in) {
  if (!a.seed_given) throw InputError("solve ts is randomized; --seed is required");
  Instance ins = load_instance(a.instance_path);
  std::set<int> absent = resolve_absent(a, ins);
  TabuConfig cfg = cfg_in;
  cfg.rng_seed = a.seed;

  std::ofstream trace;
  if (!a.trace_path.empty()) {
    trace.open(a.trace_path, std::ios::trunc);
    if (!trace) throw InputError("cannot write '" + a.trace_path + "'");
    json header{{"config",
                 {{"always_move", cfg.always_move},
                  {"m_diff", cfg.m_diff},
                  {"max_deadhead_chain", cfg.max_deadhead_chain},
                  {"max_iterations", cfg.max_iterations},
                  {"max_task_failures", cfg.max_task_failures},
                  {"rng_seed", cfg.rng_seed},
                  {"tabu_tenure", cfg.tabu_tenure},
                  {"threads", a.threads}}},
                {"instance", ins.name},
                {"solver", "ts"}};
    trace << header.dump() << "\n";
  }

  double t0 = now_seconds();
  TabuResult res = solve_tabu(ins, absent, cfg, [&](const TraceRow& row, const Schedule&) {
    if (trace.is_open()) trace << tabu_trace_json(row).dump() << "\n";
  });
  double wall = now_seconds() - t0;
  if (trace.is_open() && !trace.flush()) throw InputError("short write to '" + a.trace_path + "'");

  json report = solve_common_report(ins, absent, res.best);
  report["solver"] = "ts";
  report["termination"] = res.termination;
  report["iterations"] = res.iterations;
  report["config"] = json{{"always_move", cfg.always_move},
                          {"m_diff", cfg.m_diff},
                          {"max_deadhead_chain", cfg.max_deadhead_chain},
                          {"max_iterations", cfg.max_iterations},
                          {"max_task_failures", cfg.max_task_failures},
                          {"rng_seed", cfg.rng_seed},
                          {"tabu_tenure", cfg.tabu_tenure},
                          {"threads", a.threads}};
  if (!a.no_timing) {
    report["peak_memory_bytes"] = peak_rss_self();
    report["wall_time_s"] = wall;
  }
  if (!a.schedule_path.empty()) save_schedule(a.schedule_path, res.best);
  emit(a.report_path, report);
  return 0;
}

int cmd_solve_cg(const SolveArgs& a, CgConfig cfg, const std::string& pool_path) {
  Instance ins = load_instance(a.instance_path);
  std::set<int> absent = resolve_absent(a, ins);

  int max_tasks = ins.rules.max_tasks_per_duty;
  DutyPool pool;
  if (!pool_path.empty()) {
    pool = load_pool(pool_path, ins, &max_tasks);
  } else {
    pool = enumerate_duties(ins.tasks, ins.rules, max_tasks);
    build_driver_index(pool, ins, ins.rules);
  }

  double t0 = now_seconds();
  CgResult res = solve_cg(ins, absent, pool, cfg);
  double wall = now_seconds() - t0;

  if (!a.trace_path.empty()) {
    std::ofstream trace(a.trace_path, std::ios::trunc);
    if (!trace) throw InputError("cannot write '" + a.trace_path + "'");
    json header{{"config",
                 {{"k", cfg.k},
                  {"pool_duties", pool.size()},
                  {"threads", a.threads},
                  {"time_limit_s", cfg.time_limit_seconds}}},
                {"instance", ins.name},
                {"solver", "cg"}};
    trace << header.dump() << "\n";
    for (const CgTraceRow& row : res.trace)
      trace << cg_trace_json(row, !a.no_timing).dump() << "\n";
    if (!trace.flush()) throw InputError("short write to '" + a.trace_path + "'");
  }

  json report = solve_common_report(ins, absent, res.schedule);
  report["solver"] = "cg";
  report["termination"] =
      res.stalled ? "stalled" : (res.time_limited ? "time_limit" : "converged");
  report["converged"] = !res.time_limited && !res.stalled;
  report["iterations"] = res.state.iteration;
  report["columns_added"] = res.state.columns_added_total;
  report["lp_bound"] = res.lp_bound;
  report["ilp_objective"] = res.ilp_objective;
  report["ilp_nodes"] = res.ilp_nodes;
  report["config"] = json{{"k", cfg.k},
                          {"pool_duties", pool.size()},
                          {"threads", a.threads},
                          {"time_limit_s", cfg.time_limit_seconds}};
  if (!a.no_timing) {
    report["peak_memory_bytes"] = peak_rss_self();
    report["wall_time_s"] = wall;
  }
  if (!a.schedule_path.empty()) save_schedule(a.schedule_path, res.schedule);
  emit(a.report_path, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"railway crew rescheduling toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "write a synthetic instance");
  struct {
    NetworkSpec net;
    ScenarioSpec sc;
    std::string stations, line_minutes, swap_stations, out;
  } g;
  gen->add_option("--lines", g.net.n_lines, "number of lines")->check(CLI::PositiveNumber);
  gen->add_option("--stations", g.stations, "stations per line, comma list (hub included)");
  gen->add_option("--line-minutes", g.line_minutes, "end-to-end travel time range 'min,max'");
  gen->add_option("--swap-stations", g.swap_stations, "handover station ids, comma list");
  gen->add_option("--operating", g.sc.n_operating, "operating drivers")
      ->check(CLI::PositiveNumber);
  gen->add_option("--standby", g.sc.n_standby, "standby drivers")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", g.sc.seed, "random seed")->required();
  gen->add_option("--name", g.sc.name, "instance name");
  gen->add_option("-o,--output", g.out, "instance JSON path")->required();
  gen->callback([&] {
    if (!g.stations.empty()) g.net.stations_per_line = parse_id_list(g.stations);
    if (!g.swap_stations.empty()) g.net.swap_stations = parse_id_list(g.swap_stations);
    if (!g.line_minutes.empty()) {
      std::vector<int> mm = parse_id_list(g.line_minutes);
      if (mm.size() != 2) throw InputError("--line-minutes wants 'min,max'");
      g.net.line_minutes_min = mm[0];
      g.net.line_minutes_max = mm[1];
    }
    Instance ins = generate(g.net, g.sc);
    save_instance(g.out, ins);
    emit("", json{{"drivers", ins.drivers.size()},
                  {"instance", ins.name},
                  {"path", g.out},
                  {"tasks", ins.tasks.size()}});
  });

  // ---- enumerate ----
  auto* enu = app.add_subcommand("enumerate", "enumerate the duty pool");
  struct {
    std::string instance_path, out;
    int max_tasks = 0;
    bool count_only = false;
    std::uint64_t budget = 1ull << 33;
  } e;
  enu->add_option("--instance", e.instance_path, "instance JSON")->required();
  enu->add_option("-M,--max-tasks", e.max_tasks, "duty length cap (default: instance rules)");
  enu->add_flag("--count-only", e.count_only, "count duties without materializing");
  enu->add_option("--budget", e.budget, "projected-memory budget in bytes");
  enu->add_option("-o,--output", e.out, "pool dump path");
  enu->callback([&] {
    if (e.count_only && !e.out.empty())
      throw InputError("--count-only does not write a pool dump");
    Instance ins = load_instance(e.instance_path);
    int mt = e.max_tasks > 0 ? e.max_tasks : ins.rules.max_tasks_per_duty;
    DutyCount dc = count_duties(ins.tasks, ins.rules, mt, e.budget);
    if (e.count_only) {
      emit("", json{{"duties", dc.count},
                    {"instance", ins.name},
                    {"max_tasks", mt},
                    {"projected_bytes", dc.projected_bytes}});
      return;
    }
    DutyPool pool = enumerate_duties(ins.tasks, ins.rules, mt);
    json out{{"duties", pool.size()}, {"instance", ins.name}, {"max_tasks", mt}};
    if (!e.out.empty()) {
      save_pool(e.out, pool, ins, mt);
      out["path"] = e.out;
    }
    emit("", out);
  });

  // ---- solve ts / solve cg ----
  auto* solve = app.add_subcommand("solve", "reschedule around absent drivers");
  solve->require_subcommand(1);
  auto* ts = solve->add_subcommand("ts", "tabu-search heuristic");
  SolveArgs tsa;
  TabuConfig tscfg;
  add_solve_flags(ts, tsa);
  ts->add_option("--iterations", tscfg.max_iterations, "search iterations")
      ->check(CLI::PositiveNumber);
  ts->add_option("--tenure", tscfg.tabu_tenure, "tabu tenure")->check(CLI::PositiveNumber);
  ts->add_option("--max-failures", tscfg.max_task_failures, "failures before a task is shelved")
      ->check(CLI::PositiveNumber);
  ts->add_option("--m-diff", tscfg.m_diff, "max net task loss per move")
      ->check(CLI::PositiveNumber);
  ts->add_option("--max-chain", tscfg.max_deadhead_chain, "longest deadhead chain")
      ->check(CLI::PositiveNumber);
  ts->add_flag("--always-move", tscfg.always_move, "drift to the best neighbor every iteration");
  ts->callback([&] {
    tsa.absent_given = ts->count("--absent") > 0;
    tsa.seed_given = ts->count("--seed") > 0;
    rc = cmd_solve_ts(tsa, tscfg);
  });

  auto* cg = solve->add_subcommand("cg", "column-generation benchmark");
  SolveArgs cga;
  CgConfig cgcfg;
  std::string cg_pool;
  add_solve_flags(cg, cga);
  cg->add_option("--pool", cg_pool, "duty-pool dump to load (else enumerate in-process)");
  cg->add_option("--time-limit", cgcfg.time_limit_seconds, "pricing-loop time limit, seconds");
  cg->add_option("--k", cgcfg.k, "columns added per pricing round")->check(CLI::PositiveNumber);
  cg->add_option("--node-limit", cgcfg.ilp_node_limit, "branch-and-bound node cap")
      ->check(CLI::PositiveNumber);
  cg->callback([&] {
    cga.absent_given = cg->count("--absent") > 0;
    cga.seed_given = cg->count("--seed") > 0;
    rc = cmd_solve_cg(cga, cgcfg, cg_pool);
  });

  // ---- check ----
  auto* chk = app.add_subcommand("check", "validate a schedule against its instance");
  struct {
    std::string instance_path, schedule_path;
  } c;
  chk->add_option("--instance", c.instance_path, "instance JSON")->required();
  chk->add_option("--schedule", c.schedule_path, "schedule JSON")->required();
  chk->callback([&] {
    Instance ins = load_instance(c.instance_path);
    Schedule s = load_schedule(c.schedule_path);
    if (s.instance_ref != ins.name)
      throw InputError("schedule references '" + s.instance_ref + "', not '" + ins.name + "'");
    auto verdicts = validate_schedule(s, ins);
    json out = json::array();
    for (const auto& [driver, verdict] : verdicts)
      out.push_back({{"driver", driver}, {"violation", violation_name(*verdict.violation)}});
    emit("", json{{"instance", ins.name}, {"violations", out}});
    rc = verdicts.empty() ? 0 : 1;
  });

  // ---- gantt ----
  auto* gnt = app.add_subcommand("gantt", "render a schedule as SVG");
  struct {
    std::string instance_path, schedule_path, diff_path, out;
  } gv;
  gnt->add_option("--instance", gv.instance_path, "instance JSON")->required();
  gnt->add_option("--schedule", gv.schedule_path, "schedule JSON")->required();
  gnt->add_option("--diff", gv.diff_path, "base schedule for change coloring");
  gnt->add_option("-o,--output", gv.out, "SVG path")->required();
  gnt->callback([&] {
    Instance ins = load_instance(gv.instance_path);
    Schedule s = load_schedule(gv.schedule_path);
    if (s.instance_ref != ins.name)
      throw InputError("schedule references '" + s.instance_ref + "', not '" + ins.name + "'");
    if (gv.diff_path.empty()) {
      save_text(gv.out, emit_gantt(s, ins));
    } else {
      Schedule base = load_schedule(gv.diff_path);
      if (base.instance_ref != ins.name)
        throw InputError("diff base references '" + base.instance_ref + "', not '" + ins.name +
                         "'");
      save_text(gv.out, emit_gantt(s, ins, &base));
    }
  });

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "benchmark the heuristic against column generation");
  CompareSpec spec;
  struct {
    std::string absent_list, out;
    int sample_n = -1;
    bool absent_given = false, no_timing = false;
  } ca;
  cmp->add_option("--instance", spec.instance_path, "instance JSON")->required();
  auto* cabs = cmp->add_option("--absent", ca.absent_list, "comma-separated absent driver ids");
  auto* csmp = cmp->add_option("--sample", ca.sample_n, "sample this many absent drivers");
  cabs->excludes(csmp);
  cmp->add_option("--seed", spec.seed, "sampling seed; heuristic run i uses seed+i")->required();
  cmp->add_option("--repeats", spec.repeats, "heuristic repetitions")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--ts-iterations", spec.ts_iterations, "heuristic iterations per run")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--cg-time-limit", spec.cg_time_limits,
                  "column-generation time limits, repeatable");
  cmp->add_option("--threads", spec.threads, "worker threads")->check(CLI::PositiveNumber);
  cmp->add_flag("--no-timing", ca.no_timing, "omit wall time and memory from outputs");
  cmp->add_option("--workdir", spec.workdir, "run-artifact directory (default: <output>.runs)");
  cmp->add_option("-o,--output", ca.out, "comparison report path (default: stdout)");
  cmp->callback([&] {
    spec.exe = self_exe_path();
    spec.timing = !ca.no_timing;
    Instance ins = load_instance(spec.instance_path);
    if (cmp->count("--absent") > 0) {
      spec.absent = parse_id_list(ca.absent_list);
    } else if (ca.sample_n >= 0) {
      std::set<int> ids = sample_absent(ins, ca.sample_n, spec.seed);
      spec.absent.assign(ids.begin(), ids.end());
    } else {
      throw InputError("one of --absent or --sample is required");
    }
    if (spec.workdir.empty())
      spec.workdir = (ca.out.empty() ? std::string("compare") : ca.out) + ".runs";
    emit(ca.out, run_compare(spec));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err{{"error", {{"message", e.what()}, {"type", "input"}}}};
    std::fputs(dump_canonical(err).c_str(), stderr);
    return 2;
  } catch (const BudgetError& ex) {
    json err{{"error", {{"message", ex.what()}, {"type", "resource"}}}};
    std::fputs(dump_canonical(err).c_str(), stderr);
    return 3;
  } catch (const TimeLimitError& ex) {
    json err{{"error", {{"message", ex.what()}, {"type", "resource"}}}};
    std::fputs(dump_canonical(err).c_str(), stderr);
    return 3;
  } catch (const Error& ex) {
    json err{{"error", {{"message", ex.what()}, {"type", "input"}}}};
    std::fputs(dump_canonical(err).c_str(), stderr);
    return 2;
  } catch (const std::exception& ex) {
    json err{{"error", {{"message", ex.what()}, {"type", "internal"}}}};
    std::fputs(dump_canonical(err).c_str(), stderr);
    return 2;
  }
  return rc;
}
