#include "wearssl/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace wearssl::eval {

void MetricsReport::add(const std::string& method, data::Task task, const F1Scores& scores) {
  CellRuns& cell = methods[method][task];
  cell.f1_macro.push_back(scores.macro);
  cell.f1_micro.push_back(scores.micro);
}

namespace {

nlohmann::json metric_json(const std::vector<double>& runs) {
  nlohmann::json j;
  j["runs"] = runs;
  if (runs.size() >= 2) {
    const Interval ci = aggregate_runs(runs);
    j["mean"] = ci.mean;
    j["ci95"] = ci.half_width;
  }
  return j;
}

std::string cell_text(const std::vector<double>& runs) {
  if (runs.empty()) return "-";
  char buf[48];
  if (runs.size() == 1) {
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * runs.front());
  } else {
    const Interval ci = aggregate_runs(runs);
    std::snprintf(buf, sizeof buf, "%.1f ± %.1f", 100.0 * ci.mean, 100.0 * ci.half_width);
  }
  return buf;
}

// Display width, counting the two-byte "±" once.
std::size_t width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++w;
  return w;
}

std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > width(s) ? w - width(s) : 0, ' '); }

}  // namespace

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["seeds"] = report.seeds;
  j["methods"] = nlohmann::json::object();
  for (const auto& [method, tasks] : report.methods) {
    nlohmann::json& m = j["methods"][method];
    for (const auto& [task, cell] : tasks) {
      m[std::string(data::task_name(task))] = {{"f1_macro", metric_json(cell.f1_macro)},
                                               {"f1_micro", metric_json(cell.f1_micro)}};
    }
  }
  return j;
}

MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& [method, tasks] : j.at("methods").items()) {
    for (const auto& [name, cell] : tasks.items()) {
      const auto task = data::parse_task(name);
      if (!task) throw std::invalid_argument("unknown task '" + name + "' in report");
      CellRuns& c = r.methods[method][*task];
      c.f1_macro = cell.at("f1_macro").at("runs").get<std::vector<double>>();
      c.f1_micro = cell.at("f1_micro").at("runs").get<std::vector<double>>();
    }
  }
  return r;
}

void merge(MetricsReport& into, const MetricsReport& more) {
  into.seeds.insert(into.seeds.end(), more.seeds.begin(), more.seeds.end());
  for (const auto& [method, tasks] : more.methods)
    for (const auto& [task, cell] : tasks) {
      CellRuns& c = into.methods[method][task];
      c.f1_macro.insert(c.f1_macro.end(), cell.f1_macro.begin(), cell.f1_macro.end());
      c.f1_micro.insert(c.f1_micro.end(), cell.f1_micro.begin(), cell.f1_micro.end());
    }
}

std::string format_table(const MetricsReport& report, const std::vector<std::string>& order) {
  std::vector<std::string> methods;
  for (const auto& m : order)
    if (report.methods.contains(m)) methods.push_back(m);
  for (const auto& [m, tasks] : report.methods)
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);

  std::vector<std::vector<std::string>> rows;
  for (const auto& m : methods) {
    std::vector<std::string> row{m};
    for (data::Task t : data::kAllTasks) {
      const auto& tasks = report.methods.at(m);
      const auto it = tasks.find(t);
      row.push_back(it == tasks.end() ? "-" : cell_text(it->second.f1_macro));
      row.push_back(it == tasks.end() ? "-" : cell_text(it->second.f1_micro));
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> w(1 + 2 * data::kTaskCount, 8);
  w[0] = std::max<std::size_t>(6, width("Method"));
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) w[c] = std::max(w[c], width(row[c]));
  for (std::size_t t = 0; t < data::kTaskCount; ++t) {
    const std::size_t need = width(std::string(data::task_title(data::kAllTasks[t])));
    const std::size_t have = w[1 + 2 * t] + 3 + w[2 + 2 * t];
    if (need > have) w[2 + 2 * t] += need - have;
  }

  std::ostringstream out;
  out << "| " << pad("", w[0]) << " |";
  for (std::size_t t = 0; t < data::kTaskCount; ++t)
    out << ' ' << pad(std::string(data::task_title(data::kAllTasks[t])), w[1 + 2 * t] + 3 + w[2 + 2 * t]) << " |";
  out << "\n| " << pad("Method", w[0]) << " |";
  for (std::size_t t = 0; t < data::kTaskCount; ++t)
    out << ' ' << pad("F1-macro", w[1 + 2 * t]) << " | " << pad("F1-micro", w[2 + 2 * t]) << " |";
  out << "\n|" << std::string(w[0] + 2, '-') << '|';
  for (std::size_t c = 1; c < w.size(); ++c) out << std::string(w[c] + 2, '-') << '|';
  out << '\n';
  for (const auto& row : rows) {
    out << "| " << pad(row[0], w[0]) << " |";
    for (std::size_t c = 1; c < row.size(); ++c) out << ' ' << pad(row[c], w[c]) << " |";
    out << '\n';
  }
  return out.str();
}

}  // namespace wearssl::eval
