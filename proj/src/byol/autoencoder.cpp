#include "wearssl/byol/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wearssl/nn/optim.hpp"

namespace wearssl::byol {

using nn::LayerSpec;
using nn::Tensor;

MinMaxScaler fit_min_max(const std::vector<data::Window>& windows) {
  if (windows.empty()) throw std::invalid_argument("cannot fit a scaler on zero windows");
  const std::size_t C = windows.front().channels(), L = windows.front().length();
  MinMaxScaler s{std::vector<double>(C, std::numeric_limits<double>::infinity()),
                 std::vector<double>(C, -std::numeric_limits<double>::infinity())};
  for (const data::Window& w : windows) {
    if (w.channels() != C) throw std::invalid_argument("windows differ in channel count");
    for (std::size_t c = 0; c < C; ++c) {
      const auto [lo, hi] = std::minmax_element(w.values.data() + c * L, w.values.data() + (c + 1) * L);
      s.min[c] = std::min(s.min[c], *lo);
      s.max[c] = std::max(s.max[c], *hi);
    }
  }
  return s;
}

Tensor scale(const MinMaxScaler& s, const Tensor& x) {
  const std::size_t C = s.min.size();
  if ((x.rank() != 2 && x.rank() != 3) || x.dim(x.rank() - 2) != C)
    throw std::invalid_argument("scaler fitted on " + std::to_string(C) + " channels cannot map shape " +
                                nn::to_string(x.shape()));
  const std::size_t L = x.dim(x.rank() - 1), rows = x.size() / L;
  Tensor out(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r % C;
    const double range = s.max[c] - s.min[c];
    for (std::size_t t = 0; t < L; ++t)
      out[r * L + t] = range > 0.0 ? (x[r * L + t] - s.min[c]) / range : 0.5;
  }
  return out;
}

std::vector<data::Window> scale(const MinMaxScaler& s, std::vector<data::Window> windows) {
  for (data::Window& w : windows) w.values = scale(s, w.values);
  return windows;
}

std::vector<LayerSpec> encoder_specs(const AutoencoderConfig& c) {
  std::vector<LayerSpec> specs;
  for (std::size_t i = 0; i < c.widths.size(); ++i) {
    if (i > 0) specs.push_back(LayerSpec::relu());
    specs.push_back(LayerSpec::dense(c.widths[i]));
  }
  return specs;
}

std::vector<LayerSpec> decoder_specs(const AutoencoderConfig& c, std::size_t input_features) {
  std::vector<LayerSpec> specs;
  for (std::size_t i = c.widths.size() - 1; i-- > 0;) {
    specs.push_back(LayerSpec::relu());
    specs.push_back(LayerSpec::dense(c.widths[i]));
  }
  specs.push_back(LayerSpec::relu());
  specs.push_back(LayerSpec::dense(input_features));
  specs.push_back(LayerSpec::sigmoid());
  return specs;
}

Autoencoder make_autoencoder(const AutoencoderConfig& c, nn::Shape sample_shape, MinMaxScaler scaler,
                             std::uint64_t seed) {
  if (c.widths.empty()) throw std::invalid_argument("autoencoder.widths must list at least one width");
  Rng enc_rng(derive_seed(seed, {0xae0}));
  Rng dec_rng(derive_seed(seed, {0xae1}));
  Autoencoder ae;
  ae.encoder = nn::Network(sample_shape, encoder_specs(c), enc_rng);
  ae.decoder = nn::Network(ae.encoder.output_shape(), decoder_specs(c, nn::element_count(sample_shape)), dec_rng);
  ae.scaler = std::move(scaler);
  return ae;
}

namespace {

void check_unit_range(const std::vector<data::Window>& scaled) {
  for (std::size_t i = 0; i < scaled.size(); ++i)
    for (double v : scaled[i].values.values())
      if (!(v >= 0.0 && v <= 1.0))
        throw std::domain_error("window " + std::to_string(i) + " has value " + std::to_string(v) +
                                " outside [0, 1] after rescaling");
}

Tensor flat_batch(const std::vector<data::Window>& windows, const std::vector<std::size_t>& idx) {
  std::vector<const data::Window*> ptrs;
  for (std::size_t i : idx) ptrs.push_back(&windows[i]);
  return data::batch_values(ptrs);
}

}  // namespace

double reconstruction_mse(const Autoencoder& ae, const std::vector<data::Window>& scaled) {
  double sum = 0.0, count = 0.0;
  constexpr std::size_t kChunk = 256;
  for (std::size_t b = 0; b < scaled.size(); b += kChunk) {
    std::vector<std::size_t> idx(std::min(kChunk, scaled.size() - b));
    std::iota(idx.begin(), idx.end(), b);
    const Tensor x = flat_batch(scaled, idx);
    const Tensor y = ae.decoder.infer(ae.encoder.infer(x));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = y[i] - x[i];
      sum += d * d;
    }
    count += static_cast<double>(x.size());
  }
  return count > 0.0 ? sum / count : 0.0;
}

AutoencoderResult pretrain_autoencoder(const std::vector<data::Window>& windows, const AutoencoderConfig& config,
                                       const AutoencoderTrainConfig& train) {
  if (windows.empty()) throw std::invalid_argument("autoencoder pretraining needs at least one window");
  return pretrain_autoencoder(
      windows, make_autoencoder(config, windows.front().values.shape(), fit_min_max(windows), train.seed), train);
}

AutoencoderResult pretrain_autoencoder(const std::vector<data::Window>& windows, Autoencoder model,
                                       const AutoencoderTrainConfig& train) {
  if (train.batch_size < 1) throw std::invalid_argument("autoencoder.batch_size must be >= 1");
  if (!(train.lr >= 0.0)) throw std::invalid_argument("autoencoder.lr must be >= 0");
  const std::vector<data::Window> scaled = scale(model.scaler, windows);
  check_unit_range(scaled);

  AutoencoderResult result;
  result.initial_mse = reconstruction_mse(model, scaled);
  nn::Adam adam;
  std::vector<nn::Parameter*> params = model.encoder.parameters();
  for (nn::Parameter* p : model.decoder.parameters()) params.push_back(p);
  Rng rng(derive_seed(train.seed, {0xae7}));
  std::vector<std::size_t> order(scaled.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < train.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < order.size(); b += train.batch_size) {
      const std::vector<std::size_t> idx(
          order.begin() + static_cast<std::ptrdiff_t>(b),
          order.begin() + static_cast<std::ptrdiff_t>(std::min(b + train.batch_size, order.size())));
      const Tensor x = flat_batch(scaled, idx);
      model.encoder.zero_grad();
      model.decoder.zero_grad();
      const Tensor y = model.decoder.forward(model.encoder.forward(x, nn::Mode::kTraining, rng),
                                             nn::Mode::kTraining, rng);
      Tensor grad(y.shape());
      double loss = 0.0;
      const double inv = 1.0 / static_cast<double>(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - x[i];
        loss += d * d * inv;
        grad[i] = 2.0 * d * inv;
      }
      if (!std::isfinite(loss)) throw nn::NonFiniteLoss(loss);
      model.encoder.backward(model.decoder.backward(grad));
      adam.step(params, train.lr);
      loss_sum += loss;
      ++steps;
    }
    result.epoch_loss.push_back(steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0);
  }
  result.final_mse = reconstruction_mse(model, scaled);
  result.model = std::move(model);
  return result;
}

nn::Checkpoint to_checkpoint(const Autoencoder& ae) {
  nn::Checkpoint ckpt;
  ckpt.kind = "autoencoder";
  ckpt.networks = {{"encoder", ae.encoder}, {"decoder", ae.decoder}};
  ckpt.arrays["input_min"] = ae.scaler.min;
  ckpt.arrays["input_max"] = ae.scaler.max;
  return ckpt;
}

Autoencoder autoencoder_from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "autoencoder")
    throw std::invalid_argument("checkpoint holds a '" + ckpt.kind + "' model, not autoencoder");
  return {ckpt.network("encoder"), ckpt.network("decoder"), {ckpt.arrays.at("input_min"), ckpt.arrays.at("input_max")}};
}

}  // namespace wearssl::byol
