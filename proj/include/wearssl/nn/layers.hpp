#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wearssl/nn/rng.hpp"
#include "wearssl/nn/tensor.hpp"

namespace wearssl::nn {

enum class Mode { kTraining, kInference };

enum class LayerKind : std::uint8_t {
  kConv1d = 0,
  kDense = 1,
  kBatchNorm1d = 2,
  kDropout = 3,
  kRelu = 4,
  kSigmoid = 5,
  kGlobalMaxPool = 6,
};

std::string to_string(LayerKind kind);

/// Declarative description of one layer. Only the fields relevant to `kind`
/// are meaningful; the rest stay at their defaults.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t units = 0;   // conv feature maps or dense output width
  std::size_t kernel = 0;  // conv1d
  std::size_t stride = 1;  // conv1d
  double rate = 0.0;       // dropout

  static LayerSpec conv1d(std::size_t maps, std::size_t kernel, std::size_t stride = 1);
  static LayerSpec dense(std::size_t width);
  static LayerSpec batchnorm1d();
  static LayerSpec dropout(double rate);
  static LayerSpec relu();
  static LayerSpec sigmoid();
  static LayerSpec global_max_pool();

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Throws std::invalid_argument when a spec violates its own invariants
/// (stride >= 1, dropout rate in [0,1), dense width >= 1, ...).
void validate(const LayerSpec& spec);

/// Raised when a tensor does not fit a layer's input contract.
class ShapeError : public std::invalid_argument {
 public:
  ShapeError(std::size_t layer_index, const std::string& message);
  std::size_t layer_index() const noexcept { return layer_index_; }

 private:
  std::size_t layer_index_;
};

/// How an optimizer should treat a parameter. Only kWeight tensors get
/// layer-wise trust scaling under LARS.
enum class ParamRole : std::uint8_t { kWeight = 0, kBias = 1, kNormScale = 2, kNormShift = 3 };

struct Parameter {
  Tensor value;
  Tensor grad;
  ParamRole role = ParamRole::kWeight;
};

// Layer state. Each layer caches what its backward pass needs during a
// training-style forward call; `apply` is the cache-free inference path.

struct Conv1d {
  std::size_t in_channels = 0, out_channels = 0, kernel = 0, stride = 1;
  Parameter weight;  // (out_channels, in_channels, kernel)
  Parameter bias;    // (out_channels)
  Tensor input;

  std::size_t output_length(std::size_t length) const noexcept { return (length - kernel) / stride + 1; }
  Tensor apply(const Tensor& x, std::size_t index) const;
  Tensor forward(const Tensor& x, std::size_t index);
  Tensor backward(const Tensor& grad_out);
};

/// Fully connected layer. Inputs of rank > 2 are flattened per sample.
struct Dense {
  std::size_t in_features = 0, out_features = 0;
  Parameter weight;  // (out_features, in_features)
  Parameter bias;    // (out_features)
  Tensor input;

  Tensor apply(const Tensor& x, std::size_t index) const;
  Tensor forward(const Tensor& x, std::size_t index);
  Tensor backward(const Tensor& grad_out);
};

struct BatchNorm1d {
  std::size_t features = 0;
  double momentum = 0.1;
  double eps = 1e-5;
  Parameter gamma;
  Parameter beta;
  Tensor running_mean;
  Tensor running_var;
  Tensor normalized;  // cached x-hat
  std::vector<double> inv_std;

  Tensor apply(const Tensor& x, std::size_t index) const;
  Tensor forward(const Tensor& x, Mode mode, std::size_t index);
  Tensor backward(const Tensor& grad_out);
};

struct Dropout {
  double rate = 0.0;
  Tensor mask;  // empty when the last forward was a pass-through

  Tensor forward(const Tensor& x, Mode mode, Rng& rng);
  Tensor backward(const Tensor& grad_out) const;
};

struct Relu {
  Tensor output;

  static Tensor apply(const Tensor& x);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out) const;
};

struct Sigmoid {
  Tensor output;

  static Tensor apply(const Tensor& x);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out) const;
};

/// (batch, channels, length) -> (batch, channels), max over time.
struct GlobalMaxPool {
  Shape input_shape;
  std::vector<std::size_t> argmax;

  static Tensor apply(const Tensor& x, std::size_t index);
  Tensor forward(const Tensor& x, std::size_t index);
  Tensor backward(const Tensor& grad_out) const;
};

using Layer = std::variant<Conv1d, Dense, BatchNorm1d, Dropout, Relu, Sigmoid, GlobalMaxPool>;

/// Materializes a layer for a per-sample input shape, drawing weights from
/// Glorot-uniform bounds. Returns the layer and its per-sample output shape.
std::pair<Layer, Shape> make_layer(const LayerSpec& spec, const Shape& sample_shape, Rng& rng,
                                   std::size_t index);

}  // namespace wearssl::nn
