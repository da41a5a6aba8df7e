#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wearssl::eval {

/// counts[actual][predicted]
using ConfusionMatrix = std::vector<std::vector<std::uint64_t>>;

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions, const std::vector<int>& labels,
                                 std::size_t n_classes);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
  std::vector<double> per_class;
};

/// Per-class F1 = 2TP / (2TP + FP + FN), taken as 0 when the class never
/// occurs in labels or predictions. Macro averages the per-class values;
/// micro pools the counts, which equals accuracy for single-label data.
F1Scores f1_scores(const ConfusionMatrix& cm);
F1Scores f1_scores(const std::vector<int>& predictions, const std::vector<int>& labels, std::size_t n_classes);

double accuracy(const ConfusionMatrix& cm);

struct Interval {
  double mean = 0.0;
  double stddev = 0.0;      // sample standard deviation
  double half_width = 0.0;  // t(1 - alpha/2, n-1) * s / sqrt(n)
  std::size_t n = 0;
};

/// Mean and Student-t confidence half-width. Needs at least 2 scores.
Interval aggregate_runs(std::span<const double> scores, double confidence = 0.95);

}  // namespace wearssl::eval
