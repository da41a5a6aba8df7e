#pragma once

#include <cstdint>
#include <vector>

#include "wearssl/byol/autoencoder.hpp"

namespace wearssl::byol {

struct ModelConfig {
  AutoencoderConfig encoder;
  std::size_t projector_hidden = 4096;
  std::size_t projection_dim = 256;
};

/// dense hidden -> batchnorm1d -> relu -> dense projection_dim.
std::vector<nn::LayerSpec> projector_specs(const ModelConfig& config);
/// A single dense projection_dim -> projection_dim map.
std::vector<nn::LayerSpec> predictor_specs(const ModelConfig& config);

struct ByolModel {
  nn::Network encoder;
  nn::Network projector;
  nn::Network predictor;
  nn::Network target_encoder;
  nn::Network target_projector;
  MinMaxScaler scaler;  // applied to windows before the encoder
};

/// Online networks from `encoder` (typically the autoencoder's encoder half)
/// plus freshly initialized heads; the target starts as an exact copy.
ByolModel make_model(const ModelConfig& config, nn::Network encoder, MinMaxScaler scaler, std::uint64_t seed);

/// Random-init online encoder and heads, as for the untrained baseline.
ByolModel make_random_model(const ModelConfig& config, nn::Shape sample_shape, MinMaxScaler scaler,
                            std::uint64_t seed);

/// Online-encoder embeddings of raw (unscaled) windows, inference mode.
nn::Tensor encode(const ByolModel& model, const nn::Tensor& windows);

std::vector<nn::Parameter*> online_parameters(ByolModel& model);     // encoder, projector, predictor
std::vector<nn::Parameter*> target_parameters(ByolModel& model);     // target encoder, target projector
std::vector<const nn::Parameter*> online_tracked(const ByolModel& model);  // encoder, projector
std::vector<const nn::Parameter*> target_tracked(const ByolModel& model);

nn::Checkpoint to_checkpoint(const ByolModel& model);
ByolModel from_checkpoint(const nn::Checkpoint& ckpt);

}  // namespace wearssl::byol
