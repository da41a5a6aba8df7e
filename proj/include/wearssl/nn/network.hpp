#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wearssl/nn/layers.hpp"

namespace wearssl::nn {

/// Ordered stack of layers with materialized parameters.
///
/// A default-constructed network has no layers and passes batches through
/// unchanged. Networks are plain values: copying one copies every parameter
/// and buffer, which is how BYOL's target network is created.
class Network {
 public:
  Network() = default;

  /// Builds the layers for a per-sample input shape, e.g. {channels, length}
  /// for a conv stack or {features} for an MLP. Shape errors name the layer.
  Network(Shape sample_shape, std::vector<LayerSpec> specs, Rng& init_rng);

  const Shape& input_shape() const noexcept { return input_shape_; }
  const Shape& output_shape() const noexcept { return output_shape_; }
  const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }

  /// Training-mode forward draws dropout masks from `rng` and updates
  /// batch-norm running statistics. Caches activations for `backward`.
  Tensor forward(const Tensor& batch, Mode mode, Rng& rng);

  /// Inference-mode forward that leaves the network untouched.
  Tensor infer(const Tensor& batch) const;

  /// Back-propagates through the cached forward pass, accumulating into each
  /// parameter's `grad`. Returns the gradient w.r.t. the network input.
  Tensor backward(const Tensor& grad_output);

  void zero_grad();

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Non-trainable state (batch-norm running statistics).
  std::vector<Tensor*> buffers();
  std::vector<const Tensor*> buffers() const;

  std::size_t parameter_count() const;

 private:
  Shape input_shape_;
  Shape output_shape_;
  std::vector<LayerSpec> specs_;
  std::vector<Layer> layers_;
};

/// Order-sensitive FNV-1a hash over every parameter value of the networks.
std::uint64_t parameter_hash(std::span<const Parameter* const> params);
std::uint64_t parameter_hash(const Network& net);

struct LossValue {
  double value = 0.0;
  Tensor grad;  // d(value)/d(network output)
};

/// A scalar-valued differentiable tail applied to a network's output.
using LossTail = std::function<LossValue(const Tensor& output)>;

/// Raised when a loss tail returns NaN or infinity.
class NonFiniteLoss : public std::runtime_error {
 public:
  explicit NonFiniteLoss(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Zeroes gradients, runs forward in `mode`, evaluates the tail, and
/// back-propagates. Gradients are left in each parameter's `grad`.
/// Returns the loss value.
double compute_gradients(Network& net, const Tensor& batch, const LossTail& tail, Mode mode, Rng& rng);

}  // namespace wearssl::nn
