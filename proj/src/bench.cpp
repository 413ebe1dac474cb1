#include "crew/bench.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "crew/duties.hpp"
#include "crew/io.hpp"
#include "crew/model.hpp"

namespace crew {

namespace {

using nlohmann::json;

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", s);
  return buf;
}

json load_report(const std::string& path) {
  json j = json::parse(load_text(path), nullptr, false);
  if (j.is_discarded()) throw Error("child produced an unreadable report at '" + path + "'");
  return j;
}

RunResult run_or_throw(const std::vector<std::string>& argv, const std::string& what) {
  RunResult r = run_subprocess(argv);
  if (r.exit_code != 0)
    throw Error(what + " exited with code " + std::to_string(r.exit_code) + ": " + r.err);
  return r;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

std::uint64_t peak_rss_self() {
  rusage ru{};
  if (getrusage(RUSAGE_SELF, &ru) != 0) return 0;
  return static_cast<std::uint64_t>(ru.ru_maxrss) * 1024;  // kilobytes on Linux
}

std::string self_exe_path() {
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw Error("cannot resolve the running executable path");
  buf[n] = '\0';
  return buf;
}

RunResult run_subprocess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error("empty argv");
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) throw Error("pipe() failed");

  auto t0 = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw Error("fork() failed");
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execv(cargv[0], cargv.data());
    std::perror("execv");
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);

  RunResult res;
  struct Tap {
    int fd;
    std::string* sink;
    bool open = true;
  } taps[2] = {{out_pipe[0], &res.out}, {err_pipe[0], &res.err}};
  char buf[4096];
  while (taps[0].open || taps[1].open) {
    pollfd fds[2];
    nfds_t n = 0;
    for (Tap& t : taps)
      if (t.open) fds[n++] = {t.fd, POLLIN, 0};
    if (poll(fds, n, -1) < 0) break;
    for (Tap& t : taps) {
      if (!t.open) continue;
      bool ready = false;
      for (nfds_t i = 0; i < n; ++i)
        if (fds[i].fd == t.fd && (fds[i].revents & (POLLIN | POLLHUP))) ready = true;
      if (!ready) continue;
      ssize_t got = read(t.fd, buf, sizeof(buf));
      if (got > 0) {
        t.sink->append(buf, static_cast<std::size_t>(got));
      } else {
        close(t.fd);
        t.open = false;
      }
    }
  }

  int status = 0;
  rusage ru{};
  wait4(pid, &status, 0, &ru);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.peak_rss_bytes = static_cast<std::uint64_t>(ru.ru_maxrss) * 1024;
  if (WIFEXITED(status))
    res.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    res.exit_code = 128 + WTERMSIG(status);
  return res;
}

json run_compare(const CompareSpec& spec) {
  namespace fs = std::filesystem;
  Instance ins = load_instance(spec.instance_path);
  fs::create_directories(spec.workdir);
  const std::string absent_arg = join_ints(spec.absent);

  // one pool for everyone, bound to the instance by its hash
  const int max_tasks = ins.rules.max_tasks_per_duty;
  DutyPool pool = enumerate_duties(ins.tasks, ins.rules, max_tasks);
  const std::string pool_path = spec.workdir + "/pool.bin";
  save_pool(pool_path, pool, ins, max_tasks);

  json ts_runs = json::array();
  std::vector<double> ts_objectives, ts_walls, ts_rates;
  for (int i = 0; i < spec.repeats; ++i) {
    const std::string stem = spec.workdir + "/ts_" + std::to_string(i);
    std::vector<std::string> argv = {
        spec.exe,        "solve",
        "ts",            "--instance",
        spec.instance_path, "--absent",
        absent_arg,      "--seed",
        std::to_string(spec.seed + static_cast<std::uint64_t>(i)), "--iterations",
        std::to_string(spec.ts_iterations), "--threads",
        std::to_string(spec.threads), "--report",
        stem + ".report.json", "--schedule-out",
        stem + ".schedule.json", "--trace",
        stem + ".trace.ndjson"};
    if (!spec.timing) argv.push_back("--no-timing");
    RunResult r = run_or_throw(argv, "heuristic run " + std::to_string(i));
    json rep = load_report(stem + ".report.json");
    double obj = rep.at("objective").at("total").get<double>();
    double rate = rep.at("assignment_rate").get<double>();
    ts_objectives.push_back(obj);
    ts_walls.push_back(r.wall_seconds);
    ts_rates.push_back(rate);
    ts_runs.push_back({{"assignment_rate", rate},
                       {"objective", obj},
                       {"peak_rss_bytes", r.peak_rss_bytes},
                       {"report", stem + ".report.json"},
                       {"seed", spec.seed + static_cast<std::uint64_t>(i)},
                       {"termination", rep.at("termination")},
                       {"wall_time_s", r.wall_seconds}});
  }

  json cg_runs = json::array();
  bool lp_le_cg_ilp = true;
  bool any_converged = false;
  bool lp_le_ts_best = true;
  double ts_best = ts_objectives.empty()
                       ? 0.0
                       : *std::min_element(ts_objectives.begin(), ts_objectives.end());
  for (std::size_t i = 0; i < spec.cg_time_limits.size(); ++i) {
    const std::string stem = spec.workdir + "/cg_" + std::to_string(i);
    std::vector<std::string> argv = {spec.exe,
                                     "solve",
                                     "cg",
                                     "--instance",
                                     spec.instance_path,
                                     "--absent",
                                     absent_arg,
                                     "--pool",
                                     pool_path,
                                     "--time-limit",
                                     fmt_seconds(spec.cg_time_limits[i]),
                                     "--threads",
                                     std::to_string(spec.threads),
                                     "--report",
                                     stem + ".report.json",
                                     "--schedule-out",
                                     stem + ".schedule.json",
                                     "--trace",
                                     stem + ".trace.ndjson"};
    if (!spec.timing) argv.push_back("--no-timing");
    RunResult r = run_or_throw(argv, "column-generation run " + std::to_string(i));
    json rep = load_report(stem + ".report.json");
    double lp = rep.at("lp_bound").get<double>();
    double ilp = rep.at("ilp_objective").get<double>();
    bool converged = rep.at("converged").get<bool>();
    lp_le_cg_ilp = lp_le_cg_ilp && lp <= ilp + 1e-6;
    if (converged) {
      any_converged = true;
      lp_le_ts_best = lp_le_ts_best && (ts_objectives.empty() || lp <= ts_best + 1e-6);
    }
    cg_runs.push_back({{"assignment_rate", rep.at("assignment_rate")},
                       {"converged", converged},
                       {"ilp_objective", ilp},
                       {"lp_bound", lp},
                       {"objective", rep.at("objective").at("total")},
                       {"peak_rss_bytes", r.peak_rss_bytes},
                       {"report", stem + ".report.json"},
                       {"time_limit_s", spec.cg_time_limits[i]},
                       {"wall_time_s", r.wall_seconds}});
  }

  double mean_obj = 0.0, mean_wall = 0.0;
  for (double v : ts_objectives) mean_obj += v;
  for (double v : ts_walls) mean_wall += v;
  if (!ts_objectives.empty()) {
    mean_obj /= static_cast<double>(ts_objectives.size());
    mean_wall /= static_cast<double>(ts_walls.size());
  }

  json out{{"absent", spec.absent},
           {"cg", cg_runs},
           {"checks",
            {{"lp_le_cg_ilp", lp_le_cg_ilp},
             {"lp_le_ts_best", any_converged && !ts_objectives.empty()
                                   ? json(lp_le_ts_best)
                                   : json(nullptr)}}},
           {"instance", ins.name},
           {"pool", {{"duties", pool.size()}, {"max_tasks", max_tasks}, {"path", pool_path}}},
           {"ts",
            {{"best_objective", ts_objectives.empty() ? json(nullptr) : json(ts_best)},
             {"mean_objective", ts_objectives.empty() ? json(nullptr) : json(mean_obj)},
             {"mean_wall_time_s", ts_walls.empty() ? json(nullptr) : json(mean_wall)},
             {"median_assignment_rate",
              ts_rates.empty() ? json(nullptr) : json(median(ts_rates))},
             {"runs", ts_runs}}}};
  if (!spec.timing) {
    // timing-free mode keeps reports byte-reproducible; scrub the harness's
    // own measurements as well
    for (json& r : out["ts"]["runs"]) {
      r.erase("wall_time_s");
      r.erase("peak_rss_bytes");
    }
    for (json& r : out["cg"]) {
      r.erase("wall_time_s");
      r.erase("peak_rss_bytes");
    }
    out["ts"].erase("mean_wall_time_s");
  }
  return out;
}

}  // namespace crew
