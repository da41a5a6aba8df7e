#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wearssl/data/types.hpp"
#include "wearssl/eval/embeddings.hpp"
#include "wearssl/eval/metrics.hpp"

namespace wearssl::eval {

struct ProbeConfig {
  double l2 = 1e-4;
  double gradient_tolerance = 1e-5;  // max-abs gradient at convergence
  int max_iterations = 5000;
};

/// Multinomial logistic regression: softmax(x W + b).
struct ProbeModel {
  nn::Tensor weight;  // (d, n_classes)
  std::vector<double> bias;
  double l2 = 0.0;
  double final_loss = 0.0;  // training objective at the solution
  int iterations = 0;

  std::size_t classes() const { return bias.size(); }
};

/// Mean cross-entropy over rows plus (l2 / 2) * |W|^2 (bias unpenalized).
/// `theta` packs W row-major followed by b; `gradient` may be null.
double probe_objective(const nn::Tensor& x, const std::vector<int>& y, std::size_t n_classes, double l2,
                       const double* theta, double* gradient);

/// Full-batch L-BFGS from `init` (zeros when empty). Throws
/// std::invalid_argument when fewer than two classes occur in `y`.
ProbeModel fit_probe(const nn::Tensor& x, const std::vector<int>& y, std::size_t n_classes,
                     const ProbeConfig& config, const std::vector<double>& init = {});

std::vector<int> predict(const ProbeModel& model, const nn::Tensor& x);

/// Hands out labels by split and refuses test labels until model selection
/// is declared finished.
class SplitGuard {
 public:
  explicit SplitGuard(const EmbeddingSet& set) : set_(set) {}

  std::vector<std::size_t> rows(data::Split split) const;
  std::vector<int> labels(data::Task task, const std::vector<std::size_t>& rows) const;
  void finish_selection() noexcept { selection_done_ = true; }

 private:
  const EmbeddingSet& set_;
  bool selection_done_ = false;
};

struct ProbeProtocol {
  std::vector<double> l2_grid = {1e-2, 1e-3, 1e-4};
  ProbeConfig probe;
  /// When set, the training rows are a participant-level bootstrap drawn
  /// with this seed instead of the full train split.
  std::optional<std::uint64_t> bootstrap_seed;
};

struct TaskOutcome {
  F1Scores test;
  F1Scores validation;  // at the selected l2
  double selected_l2 = 0.0;
};

/// Standardizes on the training rows, picks l2 by validation F1-macro
/// (first best in grid order), then scores the test split once.
TaskOutcome evaluate_task(const EmbeddingSet& set, data::Task task, const ProbeProtocol& protocol);

/// Participant-level bootstrap of the given rows.
std::vector<std::size_t> bootstrap_rows(const EmbeddingSet& set, const std::vector<std::size_t>& rows,
                                        std::uint64_t seed);

}  // namespace wearssl::eval
