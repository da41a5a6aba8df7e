#include "wearssl/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "wearssl/nn/eigen_view.hpp"

namespace wearssl::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv1d: return "conv1d";
    case LayerKind::kDense: return "dense";
    case LayerKind::kBatchNorm1d: return "batchnorm1d";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kSigmoid: return "sigmoid";
    case LayerKind::kGlobalMaxPool: return "global-max-pool";
  }
  return "unknown";
}

LayerSpec LayerSpec::conv1d(std::size_t maps, std::size_t kernel, std::size_t stride) {
  return {LayerKind::kConv1d, maps, kernel, stride, 0.0};
}
LayerSpec LayerSpec::dense(std::size_t width) { return {LayerKind::kDense, width, 0, 1, 0.0}; }
LayerSpec LayerSpec::batchnorm1d() { return {LayerKind::kBatchNorm1d, 0, 0, 1, 0.0}; }
LayerSpec LayerSpec::dropout(double rate) { return {LayerKind::kDropout, 0, 0, 1, rate}; }
LayerSpec LayerSpec::relu() { return {LayerKind::kRelu, 0, 0, 1, 0.0}; }
LayerSpec LayerSpec::sigmoid() { return {LayerKind::kSigmoid, 0, 0, 1, 0.0}; }
LayerSpec LayerSpec::global_max_pool() { return {LayerKind::kGlobalMaxPool, 0, 0, 1, 0.0}; }

void validate(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::kConv1d:
      if (spec.units == 0) throw std::invalid_argument("conv1d needs at least one feature map");
      if (spec.kernel == 0) throw std::invalid_argument("conv1d kernel width must be >= 1");
      if (spec.stride == 0) throw std::invalid_argument("conv1d stride must be >= 1");
      break;
    case LayerKind::kDense:
      if (spec.units == 0) throw std::invalid_argument("dense output width must be >= 1");
      break;
    case LayerKind::kDropout:
      if (!(spec.rate >= 0.0 && spec.rate < 1.0))
        throw std::invalid_argument("dropout rate must lie in [0, 1), got " + std::to_string(spec.rate));
      break;
    default:
      break;
  }
}

ShapeError::ShapeError(std::size_t layer_index, const std::string& message)
    : std::invalid_argument("layer " + std::to_string(layer_index) + ": " + message),
      layer_index_(layer_index) {}

namespace {

Parameter make_param(Shape shape, ParamRole role) {
  Parameter p;
  p.value = Tensor(shape);
  p.grad = Tensor(std::move(shape));
  p.role = role;
  return p;
}

void glorot_uniform(Tensor& w, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w.values()) v = dist(rng);
}

void check_conv_input(const Conv1d& c, const Tensor& x, std::size_t index) {
  if (x.rank() != 3)
    throw ShapeError(index, "conv1d expects (batch, channels, length), got " + to_string(x.shape()));
  if (x.dim(1) != c.in_channels)
    throw ShapeError(index, "conv1d expects " + std::to_string(c.in_channels) + " channels, got " +
                                std::to_string(x.dim(1)));
  if (x.dim(2) < c.kernel)
    throw ShapeError(index, "conv1d input length " + std::to_string(x.dim(2)) + " shorter than kernel " +
                                std::to_string(c.kernel));
}

// Rows are output positions, columns (channel, tap) pairs:
// col(t, c*K + k) = x(c, t*stride + k) for one sample.
void im2row(const double* x, std::size_t channels, std::size_t length, std::size_t kernel, std::size_t stride,
            std::size_t out_len, double* col) {
  const std::size_t patch = channels * kernel;
  for (std::size_t t = 0; t < out_len; ++t) {
    double* row = col + t * patch;
    for (std::size_t c = 0; c < channels; ++c)
      std::copy_n(x + c * length + t * stride, kernel, row + c * kernel);
  }
}

void row2im_add(const double* col, std::size_t channels, std::size_t length, std::size_t kernel,
                std::size_t stride, std::size_t out_len, double* x) {
  const std::size_t patch = channels * kernel;
  for (std::size_t t = 0; t < out_len; ++t) {
    const double* row = col + t * patch;
    for (std::size_t c = 0; c < channels; ++c) {
      double* xc = x + c * length + t * stride;
      for (std::size_t k = 0; k < kernel; ++k) xc[k] += row[c * kernel + k];
    }
  }
}

// Samples per GEMM: enough output rows to keep the multiply efficient.
std::size_t conv_chunk(std::size_t out_len) { return std::max<std::size_t>(1, 2048 / std::max<std::size_t>(out_len, 1)); }

std::size_t flat_features(const Tensor& x) { return x.rank() == 0 || x.dim(0) == 0 ? 0 : x.size() / x.dim(0); }

void check_dense_input(const Dense& d, const Tensor& x, std::size_t index) {
  if (x.rank() < 2 || flat_features(x) != d.in_features)
    throw ShapeError(index, "dense expects " + std::to_string(d.in_features) +
                                " features per sample, got shape " + to_string(x.shape()));
}

void check_bn_input(const BatchNorm1d& bn, const Tensor& x, std::size_t index) {
  if (x.rank() != 2 || x.dim(1) != bn.features)
    throw ShapeError(index, "batchnorm1d expects (batch, " + std::to_string(bn.features) + "), got " +
                                to_string(x.shape()));
}

}  // namespace

// ---------------------------------------------------------------- Conv1d

Tensor Conv1d::apply(const Tensor& x, std::size_t index) const {
  check_conv_input(*this, x, index);
  const std::size_t batch = x.dim(0), length = x.dim(2), out_len = output_length(length);
  const std::size_t patch = in_channels * kernel, chunk = conv_chunk(out_len);
  Tensor y({batch, out_channels, out_len});
  AlignedBuffer col(chunk * out_len * patch);
  RowMatrix rows(static_cast<Eigen::Index>(chunk * out_len), static_cast<Eigen::Index>(out_channels));
  const auto w = const_matrix(weight.value.data(), out_channels, patch);
  const auto b = const_vector(bias.value.data(), out_channels);
  for (std::size_t n0 = 0; n0 < batch; n0 += chunk) {
    const std::size_t m = std::min(chunk, batch - n0);
    for (std::size_t j = 0; j < m; ++j)
      im2row(x.data() + (n0 + j) * in_channels * length, in_channels, length, kernel, stride, out_len,
             col.data() + j * out_len * patch);
    auto r = rows.topRows(static_cast<Eigen::Index>(m * out_len));
    r.noalias() = const_matrix(col.data(), m * out_len, patch) * w.transpose();
    r.rowwise() += b.transpose();
    for (std::size_t j = 0; j < m; ++j)
      matrix(y.data() + (n0 + j) * out_channels * out_len, out_channels, out_len) =
          r.middleRows(static_cast<Eigen::Index>(j * out_len), static_cast<Eigen::Index>(out_len)).transpose();
  }
  return y;
}

Tensor Conv1d::forward(const Tensor& x, std::size_t index) {
  Tensor y = apply(x, index);
  input = x;
  return y;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
  const std::size_t batch = input.dim(0), length = input.dim(2), out_len = output_length(length);
  const std::size_t patch = in_channels * kernel, chunk = conv_chunk(out_len);
  Tensor grad_in(input.shape());
  AlignedBuffer col(chunk * out_len * patch), dcol(chunk * out_len * patch);
  RowMatrix dy(static_cast<Eigen::Index>(chunk * out_len), static_cast<Eigen::Index>(out_channels));
  const auto w = const_matrix(weight.value.data(), out_channels, patch);
  auto dw = matrix(weight.grad.data(), out_channels, patch);
  auto db = vector(bias.grad.data(), out_channels);
  for (std::size_t n0 = 0; n0 < batch; n0 += chunk) {
    const std::size_t m = std::min(chunk, batch - n0);
    for (std::size_t j = 0; j < m; ++j) {
      im2row(input.data() + (n0 + j) * in_channels * length, in_channels, length, kernel, stride, out_len,
             col.data() + j * out_len * patch);
      dy.middleRows(static_cast<Eigen::Index>(j * out_len), static_cast<Eigen::Index>(out_len)) =
          const_matrix(grad_out.data() + (n0 + j) * out_channels * out_len, out_channels, out_len).transpose();
    }
    const auto d = dy.topRows(static_cast<Eigen::Index>(m * out_len));
    dw.noalias() += d.transpose() * const_matrix(col.data(), m * out_len, patch);
    db += d.colwise().sum().transpose();
    matrix(dcol.data(), m * out_len, patch).noalias() = d * w;
    for (std::size_t j = 0; j < m; ++j)
      row2im_add(dcol.data() + j * out_len * patch, in_channels, length, kernel, stride, out_len,
                 grad_in.data() + (n0 + j) * in_channels * length);
  }
  return grad_in;
}

// ----------------------------------------------------------------- Dense

Tensor Dense::apply(const Tensor& x, std::size_t index) const {
  check_dense_input(*this, x, index);
  const std::size_t batch = x.dim(0);
  Tensor y({batch, out_features});
  auto ym = matrix(y.data(), batch, out_features);
  ym.noalias() = const_matrix(x.data(), batch, in_features) *
                 const_matrix(weight.value.data(), out_features, in_features).transpose();
  ym.rowwise() += const_vector(bias.value.data(), out_features).transpose();
  return y;
}

Tensor Dense::forward(const Tensor& x, std::size_t index) {
  Tensor y = apply(x, index);
  input = x;
  return y;
}

Tensor Dense::backward(const Tensor& grad_out) {
  const std::size_t batch = input.dim(0);
  const auto dy = const_matrix(grad_out.data(), batch, out_features);
  const auto xm = const_matrix(input.data(), batch, in_features);
  matrix(weight.grad.data(), out_features, in_features).noalias() += dy.transpose() * xm;
  vector(bias.grad.data(), out_features) += dy.colwise().sum().transpose();
  Tensor grad_in(input.shape());
  matrix(grad_in.data(), batch, in_features).noalias() =
      dy * const_matrix(weight.value.data(), out_features, in_features);
  return grad_in;
}

// ----------------------------------------------------------- BatchNorm1d

Tensor BatchNorm1d::apply(const Tensor& x, std::size_t index) const {
  check_bn_input(*this, x, index);
  Tensor y(x.shape());
  const std::size_t batch = x.dim(0);
  for (std::size_t f = 0; f < features; ++f) {
    const double scale = gamma.value[f] / std::sqrt(running_var[f] + eps);
    for (std::size_t n = 0; n < batch; ++n)
      y.at(n, f) = (x.at(n, f) - running_mean[f]) * scale + beta.value[f];
  }
  return y;
}

Tensor BatchNorm1d::forward(const Tensor& x, Mode mode, std::size_t index) {
  if (mode == Mode::kInference) return apply(x, index);
  check_bn_input(*this, x, index);
  const std::size_t batch = x.dim(0);
  if (batch < 2) throw ShapeError(index, "batchnorm1d needs at least 2 samples per batch in training mode");
  normalized = Tensor(x.shape());
  inv_std.assign(features, 0.0);
  Tensor y(x.shape());
  for (std::size_t f = 0; f < features; ++f) {
    double mean = 0.0;
    for (std::size_t n = 0; n < batch; ++n) mean += x.at(n, f);
    mean /= static_cast<double>(batch);
    double var = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
      const double d = x.at(n, f) - mean;
      var += d * d;
    }
    const double unbiased = var / static_cast<double>(batch - 1);
    var /= static_cast<double>(batch);
    inv_std[f] = 1.0 / std::sqrt(var + eps);
    for (std::size_t n = 0; n < batch; ++n) {
      const double xh = (x.at(n, f) - mean) * inv_std[f];
      normalized.at(n, f) = xh;
      y.at(n, f) = gamma.value[f] * xh + beta.value[f];
    }
    running_mean[f] = (1.0 - momentum) * running_mean[f] + momentum * mean;
    running_var[f] = (1.0 - momentum) * running_var[f] + momentum * unbiased;
  }
  return y;
}

Tensor BatchNorm1d::backward(const Tensor& grad_out) {
  const std::size_t batch = normalized.dim(0);
  const double nb = static_cast<double>(batch);
  Tensor grad_in(normalized.shape());
  for (std::size_t f = 0; f < features; ++f) {
    double sum_dy = 0.0, sum_dy_xh = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
      sum_dy += grad_out.at(n, f);
      sum_dy_xh += grad_out.at(n, f) * normalized.at(n, f);
    }
    gamma.grad[f] += sum_dy_xh;
    beta.grad[f] += sum_dy;
    const double k = gamma.value[f] * inv_std[f] / nb;
    for (std::size_t n = 0; n < batch; ++n)
      grad_in.at(n, f) = k * (nb * grad_out.at(n, f) - sum_dy - normalized.at(n, f) * sum_dy_xh);
  }
  return grad_in;
}

// --------------------------------------------------------------- Dropout

Tensor Dropout::forward(const Tensor& x, Mode mode, Rng& rng) {
  if (mode == Mode::kInference || rate == 0.0) {
    mask = Tensor();
    return x;
  }
  mask = Tensor(x.shape());
  const double keep = 1.0 / (1.0 - rate);
  // A raw draw below rate * 2^64 drops the unit.
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(rate, 64));
  for (double& m : mask.values()) m = rng() >= threshold ? keep : 0.0;
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= mask[i];
  return y;
}

Tensor Dropout::backward(const Tensor& grad_out) const {
  if (mask.empty()) return grad_out;
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
  return g;
}

// ------------------------------------------------------------ activations

Tensor Relu::apply(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor Relu::forward(const Tensor& x) {
  output = apply(x);
  return output;
}

Tensor Relu::backward(const Tensor& grad_out) const {
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(output[i] > 0.0)) g[i] = 0.0;
  return g;
}

Tensor Sigmoid::apply(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = 1.0 / (1.0 + std::exp(-v));
  return y;
}

Tensor Sigmoid::forward(const Tensor& x) {
  output = apply(x);
  return output;
}

Tensor Sigmoid::backward(const Tensor& grad_out) const {
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= output[i] * (1.0 - output[i]);
  return g;
}

// --------------------------------------------------------- GlobalMaxPool

Tensor GlobalMaxPool::apply(const Tensor& x, std::size_t index) {
  if (x.rank() != 3 || x.dim(2) == 0)
    throw ShapeError(index, "global-max-pool expects (batch, channels, length), got " + to_string(x.shape()));
  const std::size_t rows = x.dim(0) * x.dim(1), length = x.dim(2);
  Tensor y({x.dim(0), x.dim(1)});
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = x.data() + r * length;
    y[r] = *std::max_element(row, row + length);
  }
  return y;
}

Tensor GlobalMaxPool::forward(const Tensor& x, std::size_t index) {
  Tensor y = apply(x, index);
  input_shape = x.shape();
  const std::size_t rows = x.dim(0) * x.dim(1), length = x.dim(2);
  argmax.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = x.data() + r * length;
    argmax[r] = static_cast<std::size_t>(std::max_element(row, row + length) - row);
  }
  return y;
}

Tensor GlobalMaxPool::backward(const Tensor& grad_out) const {
  Tensor g(input_shape);
  const std::size_t length = input_shape[2];
  for (std::size_t r = 0; r < argmax.size(); ++r) g[r * length + argmax[r]] = grad_out[r];
  return g;
}

// -------------------------------------------------------------- factory

std::pair<Layer, Shape> make_layer(const LayerSpec& spec, const Shape& sample_shape, Rng& rng,
                                   std::size_t index) {
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ShapeError(index, e.what());
  }
  switch (spec.kind) {
    case LayerKind::kConv1d: {
      if (sample_shape.size() != 2)
        throw ShapeError(index, "conv1d needs a (channels, length) input, got " + to_string(sample_shape));
      Conv1d c;
      c.in_channels = sample_shape[0];
      c.out_channels = spec.units;
      c.kernel = spec.kernel;
      c.stride = spec.stride;
      if (sample_shape[1] < c.kernel)
        throw ShapeError(index, "input length " + std::to_string(sample_shape[1]) + " shorter than kernel " +
                                    std::to_string(c.kernel));
      c.weight = make_param({c.out_channels, c.in_channels, c.kernel}, ParamRole::kWeight);
      c.bias = make_param({c.out_channels}, ParamRole::kBias);
      glorot_uniform(c.weight.value, static_cast<double>(c.in_channels * c.kernel),
                     static_cast<double>(c.out_channels * c.kernel), rng);
      Shape out{c.out_channels, c.output_length(sample_shape[1])};
      return {std::move(c), std::move(out)};
    }
    case LayerKind::kDense: {
      Dense d;
      d.in_features = element_count(sample_shape);
      d.out_features = spec.units;
      if (d.in_features == 0) throw ShapeError(index, "dense input has no features");
      d.weight = make_param({d.out_features, d.in_features}, ParamRole::kWeight);
      d.bias = make_param({d.out_features}, ParamRole::kBias);
      glorot_uniform(d.weight.value, static_cast<double>(d.in_features), static_cast<double>(d.out_features),
                     rng);
      return {std::move(d), Shape{spec.units}};
    }
    case LayerKind::kBatchNorm1d: {
      if (sample_shape.size() != 1)
        throw ShapeError(index, "batchnorm1d needs a flat feature input, got " + to_string(sample_shape));
      BatchNorm1d bn;
      bn.features = sample_shape[0];
      bn.gamma = make_param({bn.features}, ParamRole::kNormScale);
      bn.gamma.value.fill(1.0);
      bn.beta = make_param({bn.features}, ParamRole::kNormShift);
      bn.running_mean = Tensor({bn.features});
      bn.running_var = Tensor({bn.features}, 1.0);
      return {std::move(bn), sample_shape};
    }
    case LayerKind::kDropout: {
      Dropout d;
      d.rate = spec.rate;
      return {std::move(d), sample_shape};
    }
    case LayerKind::kRelu:
      return {Relu{}, sample_shape};
    case LayerKind::kSigmoid:
      return {Sigmoid{}, sample_shape};
    case LayerKind::kGlobalMaxPool:
      if (sample_shape.size() != 2)
        throw ShapeError(index, "global-max-pool needs a (channels, length) input, got " + to_string(sample_shape));
      return {GlobalMaxPool{}, Shape{sample_shape[0]}};
  }
  throw ShapeError(index, "unknown layer kind");
}

}  // namespace wearssl::nn
