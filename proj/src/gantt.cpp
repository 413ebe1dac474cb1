#include "crew/gantt.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace crew {

namespace {

constexpr int kLeft = 120;   // label gutter
constexpr int kTop = 48;     // axis header
constexpr int kRight = 24;
constexpr int kLaneH = 26;
constexpr int kLaneGap = 10;
constexpr int kBarH = 18;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string emit_gantt(const Schedule& s, const Instance& instance, const Schedule* diff_base) {
  // time range covers every shift window and every task in the schedule
  int t_min = 24 * 60, t_max = 0;
  for (const auto& [did, entries] : s.assignments) {
    const Driver& d = instance.driver(did);
    t_min = std::min(t_min, d.shift_start);
    t_max = std::max(t_max, d.shift_end);
    for (const AssignmentEntry& e : entries) {
      t_min = std::min(t_min, instance.task(e.task).start_time);
      t_max = std::max(t_max, instance.task(e.task).end_time);
    }
  }
  for (int tid : s.unassigned) {
    t_min = std::min(t_min, instance.task(tid).start_time);
    t_max = std::max(t_max, instance.task(tid).end_time);
  }
  if (t_min > t_max) {  // empty schedule: render one default day
    t_min = 0;
    t_max = 24 * 60;
  }
  t_min = (t_min / 60) * 60;
  t_max = ((t_max + 59) / 60) * 60;

  // who drove what in the base schedule, for diff classes
  std::map<int, int> base_driver;
  if (diff_base)
    for (const auto& [did, entries] : diff_base->assignments)
      for (const AssignmentEntry& e : entries)
        if (e.mode == AssignMode::Drive) base_driver[e.task] = did;

  auto classify = [&](int task, int driver) -> std::string {
    if (!diff_base) return "";
    if (diff_base->unassigned.count(task)) return " recovered";
    auto it = base_driver.find(task);
    if (it != base_driver.end() && it->second != driver) return " moved";
    return " kept";
  };

  const int n_lanes = static_cast<int>(s.assignments.size()) + (s.unassigned.empty() ? 0 : 1);
  const int width = kLeft + (t_max - t_min) + kRight;
  const int height = kTop + n_lanes * (kLaneH + kLaneGap) + 24;
  auto x_of = [&](int t) { return kLeft + (t - t_min); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<style>\n"
         "text{font-family:sans-serif;font-size:11px;fill:#202124}\n"
         ".task{fill:#9aa0a6;stroke:#3c4043;stroke-width:1}\n"
         ".kept{fill:#9aa0a6}\n"
         ".moved{fill:#4a7dd6}\n"
         ".recovered{fill:#e8883a}\n"
         ".pool{fill:#f3d19c;stroke-dasharray:4 2}\n"
         ".ride{fill-opacity:0.45;stroke-dasharray:3 2}\n"
         ".shift{stroke:#d93025;stroke-width:2}\n"
         ".grid{stroke:#dadce0;stroke-width:1}\n"
         "</style>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"16\">" << xml_escape(s.instance_ref) << "</text>\n";

  // hour grid
  for (int t = t_min; t <= t_max; t += 60) {
    svg << "<line class=\"grid\" x1=\"" << x_of(t) << "\" y1=\"" << kTop - 12 << "\" x2=\""
        << x_of(t) << "\" y2=\"" << height - 20 << "\"/>\n";
    svg << "<text x=\"" << x_of(t) - 12 << "\" y=\"" << kTop - 16 << "\">"
        << (t / 60) << ":00</text>\n";
  }

  int y = kTop;
  for (const auto& [did, entries] : s.assignments) {
    const Driver& d = instance.driver(did);
    svg << "<text x=\"8\" y=\"" << y + kBarH - 4 << "\">driver " << did
        << (d.kind == DriverKind::Standby ? " (standby)" : "") << "</text>\n";
    for (int edge : {d.shift_start, d.shift_end})
      svg << "<line class=\"shift\" x1=\"" << x_of(edge) << "\" y1=\"" << y - 3 << "\" x2=\""
          << x_of(edge) << "\" y2=\"" << y + kBarH + 3 << "\"/>\n";
    for (const AssignmentEntry& e : entries) {
      const Task& t = instance.task(e.task);
      svg << "<rect class=\"task" << classify(e.task, did)
          << (e.mode == AssignMode::Deadhead ? " ride" : "") << "\" x=\""
          << x_of(t.start_time) << "\" y=\"" << y << "\" width=\"" << t.duration()
          << "\" height=\"" << kBarH << "\"><title>task " << e.task << " "
          << t.start_depot << "-&gt;" << t.end_depot << " " << t.start_time << "-"
          << t.end_time << (e.mode == AssignMode::Deadhead ? " (ride)" : "")
          << "</title></rect>\n";
      svg << "<text x=\"" << x_of(t.start_time) + 3 << "\" y=\"" << y + kBarH - 5 << "\">"
          << e.task << "</text>\n";
    }
    y += kLaneH + kLaneGap;
  }

  if (!s.unassigned.empty()) {
    svg << "<text x=\"8\" y=\"" << y + kBarH - 4 << "\">unassigned</text>\n";
    for (int tid : s.unassigned) {
      const Task& t = instance.task(tid);
      svg << "<rect class=\"task pool\" x=\"" << x_of(t.start_time) << "\" y=\"" << y
          << "\" width=\"" << t.duration() << "\" height=\"" << kBarH << "\"><title>task "
          << tid << " " << t.start_depot << "-&gt;" << t.end_depot << " " << t.start_time
          << "-" << t.end_time << "</title></rect>\n";
      svg << "<text x=\"" << x_of(t.start_time) + 3 << "\" y=\"" << y + kBarH - 5 << "\">"
          << tid << "</text>\n";
    }
    y += kLaneH + kLaneGap;
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace crew
