#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wearssl/nn/layers.hpp"

namespace wearssl::nn {

/// Cosine decay from base_lr at step 0 to zero at total_steps, with no
/// warmup. Steps past the end clamp to zero.
double cosine_lr(std::int64_t step, std::int64_t total_steps, double base_lr);

/// Per-parameter accumulators plus the step counter. `first` holds Adam's
/// first moment or the LARS momentum buffer; `second` is Adam-only.
struct OptimizerState {
  std::vector<Tensor> first;
  std::vector<Tensor> second;
  std::uint64_t step = 0;
};

struct LarsConfig {
  double momentum = 0.9;
  double weight_decay = 1e-6;
  double trust_coefficient = 1e-3;
  double eps = 1e-9;
};

/// trust_coefficient * |w| / (|g| + weight_decay*|w| + eps), or 1 when the
/// parameter norm is zero.
double lars_trust_ratio(double weight_norm, double grad_norm, const LarsConfig& config);

/// Layer-wise adaptive rate scaling with heavy-ball momentum. Weight
/// tensors get the trust ratio and weight decay; biases and batch-norm
/// parameters get plain momentum SGD at the scheduled rate.
class Lars {
 public:
  explicit Lars(LarsConfig config = {}) : config_(config) {}

  void step(std::span<Parameter* const> params, double lr);

  const LarsConfig& config() const noexcept { return config_; }
  const OptimizerState& state() const noexcept { return state_; }
  OptimizerState& state() noexcept { return state_; }

 private:
  LarsConfig config_;
  OptimizerState state_;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(std::span<Parameter* const> params, double lr);

  const AdamConfig& config() const noexcept { return config_; }
  const OptimizerState& state() const noexcept { return state_; }
  OptimizerState& state() noexcept { return state_; }

 private:
  AdamConfig config_;
  OptimizerState state_;
};

}  // namespace wearssl::nn
