#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wearssl/data/types.hpp"
#include "wearssl/eval/metrics.hpp"

namespace wearssl::eval {

/// Per-run scores of one (method, task) cell, in run order.
struct CellRuns {
  std::vector<double> f1_macro;
  std::vector<double> f1_micro;
};

/// Scores keyed by method name and task.
struct MetricsReport {
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::map<data::Task, CellRuns>> methods;

  void add(const std::string& method, data::Task task, const F1Scores& scores);
};

/// {"seeds": [...], "methods": {method: {task: {"f1_macro": {"runs": [...],
/// "mean": m, "ci95": h}, "f1_micro": {...}}}}}. Mean and ci95 are present
/// once a cell has at least two runs.
nlohmann::json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& json);

/// Appends the runs and seeds of `more` to `into`.
void merge(MetricsReport& into, const MetricsReport& more);

/// Methods as rows, tasks as column pairs (F1-macro, F1-micro), cells as
/// "mean ± ci95" in percent. Methods listed in `order` come first; missing
/// cells print as "-".
std::string format_table(const MetricsReport& report, const std::vector<std::string>& order = {});

}  // namespace wearssl::eval
