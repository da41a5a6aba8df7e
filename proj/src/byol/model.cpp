#include "wearssl/byol/model.hpp"

#include <stdexcept>

namespace wearssl::byol {

using nn::LayerSpec;

std::vector<LayerSpec> projector_specs(const ModelConfig& c) {
  return {LayerSpec::dense(c.projector_hidden), LayerSpec::batchnorm1d(), LayerSpec::relu(),
          LayerSpec::dense(c.projection_dim)};
}

std::vector<LayerSpec> predictor_specs(const ModelConfig& c) { return {LayerSpec::dense(c.projection_dim)}; }

ByolModel make_model(const ModelConfig& c, nn::Network encoder, MinMaxScaler scaler, std::uint64_t seed) {
  Rng proj_rng(derive_seed(seed, {0x970}));
  Rng pred_rng(derive_seed(seed, {0x9ed}));
  ByolModel m;
  m.encoder = std::move(encoder);
  m.projector = nn::Network(m.encoder.output_shape(), projector_specs(c), proj_rng);
  m.predictor = nn::Network(m.projector.output_shape(), predictor_specs(c), pred_rng);
  m.target_encoder = m.encoder;
  m.target_projector = m.projector;
  m.scaler = std::move(scaler);
  return m;
}

ByolModel make_random_model(const ModelConfig& c, nn::Shape sample_shape, MinMaxScaler scaler, std::uint64_t seed) {
  Rng enc_rng(derive_seed(seed, {0xe4c}));
  nn::Network encoder(std::move(sample_shape), encoder_specs(c.encoder), enc_rng);
  return make_model(c, std::move(encoder), std::move(scaler), seed);
}

nn::Tensor encode(const ByolModel& model, const nn::Tensor& windows) {
  return model.encoder.infer(scale(model.scaler, windows));
}

namespace {
template <class P, class... N>
std::vector<P> collect(N&... nets) {
  std::vector<P> out;
  (
      [&] {
        for (P p : nets.parameters()) out.push_back(p);
      }(),
      ...);
  return out;
}
}  // namespace

std::vector<nn::Parameter*> online_parameters(ByolModel& m) {
  return collect<nn::Parameter*>(m.encoder, m.projector, m.predictor);
}
std::vector<nn::Parameter*> target_parameters(ByolModel& m) {
  return collect<nn::Parameter*>(m.target_encoder, m.target_projector);
}
std::vector<const nn::Parameter*> online_tracked(const ByolModel& m) {
  return collect<const nn::Parameter*>(m.encoder, m.projector);
}
std::vector<const nn::Parameter*> target_tracked(const ByolModel& m) {
  return collect<const nn::Parameter*>(m.target_encoder, m.target_projector);
}

nn::Checkpoint to_checkpoint(const ByolModel& m) {
  nn::Checkpoint ckpt;
  ckpt.kind = "byol";
  ckpt.networks = {{"encoder", m.encoder},
                   {"projector", m.projector},
                   {"predictor", m.predictor},
                   {"target_encoder", m.target_encoder},
                   {"target_projector", m.target_projector}};
  ckpt.arrays["input_min"] = m.scaler.min;
  ckpt.arrays["input_max"] = m.scaler.max;
  return ckpt;
}

ByolModel from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "byol") throw std::invalid_argument("checkpoint holds a '" + ckpt.kind + "' model, not byol");
  return {ckpt.network("encoder"),
          ckpt.network("projector"),
          ckpt.network("predictor"),
          ckpt.network("target_encoder"),
          ckpt.network("target_projector"),
          {ckpt.arrays.at("input_min"), ckpt.arrays.at("input_max")}};
}

}  // namespace wearssl::byol
