#include "wearssl/simclr/model.hpp"

#include <stdexcept>

namespace wearssl::simclr {

using nn::LayerSpec;

void validate(const ModelConfig& c) {
  if (c.channels == 0) throw std::invalid_argument("model.channels must be >= 1");
  if (c.feature_maps.empty() || c.feature_maps.size() != c.kernels.size())
    throw std::invalid_argument("model.feature_maps and model.kernels must be non-empty and equally long");
  if (c.head_widths.empty()) throw std::invalid_argument("model.head_widths must list at least one width");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw std::invalid_argument("model.dropout must lie in [0, 1)");
  for (std::size_t k : c.kernels)
    if (k == 0) throw std::invalid_argument("model.kernels entries must be >= 1");
  if (c.length < receptive_field(c))
    throw std::invalid_argument("window length " + std::to_string(c.length) + " is shorter than the encoder's " +
                                "receptive field of " + std::to_string(receptive_field(c)));
}

std::size_t receptive_field(const ModelConfig& c) {
  std::size_t rf = 1;
  for (std::size_t k : c.kernels) rf += k - 1;
  return rf;
}

std::vector<LayerSpec> encoder_specs(const ModelConfig& c) {
  std::vector<LayerSpec> specs;
  for (std::size_t i = 0; i < c.feature_maps.size(); ++i) {
    specs.push_back(LayerSpec::conv1d(c.feature_maps[i], c.kernels[i]));
    specs.push_back(LayerSpec::relu());
    specs.push_back(LayerSpec::dropout(c.dropout));
  }
  specs.push_back(LayerSpec::global_max_pool());
  return specs;
}

std::vector<LayerSpec> head_specs(const ModelConfig& c) {
  std::vector<LayerSpec> specs;
  for (std::size_t i = 0; i < c.head_widths.size(); ++i) {
    if (i > 0) specs.push_back(LayerSpec::relu());
    specs.push_back(LayerSpec::dense(c.head_widths[i]));
  }
  return specs;
}

SimclrModel make_model(const ModelConfig& c, std::uint64_t seed) {
  validate(c);
  Rng enc_rng(derive_seed(seed, {0xe4c}));
  Rng head_rng(derive_seed(seed, {0x4ead}));
  SimclrModel m;
  m.encoder = nn::Network({c.channels, c.length}, encoder_specs(c), enc_rng);
  m.head = nn::Network(m.encoder.output_shape(), head_specs(c), head_rng);
  return m;
}

nn::Tensor encode(const nn::Network& encoder, const nn::Tensor& windows) {
  if (windows.rank() != 3) throw std::invalid_argument("encode expects (batch, channels, length)");
  return encoder.infer(windows);
}

nn::Checkpoint to_checkpoint(const SimclrModel& model) {
  nn::Checkpoint ckpt;
  ckpt.kind = "simclr";
  ckpt.networks = {{"encoder", model.encoder}, {"head", model.head}};
  return ckpt;
}

SimclrModel from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "simclr") throw std::invalid_argument("checkpoint holds a '" + ckpt.kind + "' model, not simclr");
  return {ckpt.network("encoder"), ckpt.network("head")};
}

}  // namespace wearssl::simclr
