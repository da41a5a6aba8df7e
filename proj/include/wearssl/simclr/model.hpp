#pragma once

#include <cstdint>
#include <vector>

#include "wearssl/nn/checkpoint.hpp"
#include "wearssl/nn/network.hpp"

namespace wearssl::simclr {

struct ModelConfig {
  std::size_t channels = 3;
  std::size_t length = 512;
  std::vector<std::size_t> feature_maps = {32, 64, 96};
  std::vector<std::size_t> kernels = {24, 16, 8};
  double dropout = 0.1;
  std::vector<std::size_t> head_widths = {258, 128, 50};
};

void validate(const ModelConfig& config);

/// conv -> relu -> dropout per stage, then global max pooling.
std::vector<nn::LayerSpec> encoder_specs(const ModelConfig& config);
/// dense layers with relu between them; the last layer is linear.
std::vector<nn::LayerSpec> head_specs(const ModelConfig& config);

/// Shortest window the conv stack accepts: sum of (kernel - 1) plus one.
std::size_t receptive_field(const ModelConfig& config);

struct SimclrModel {
  nn::Network encoder;  // (batch, C, L) -> (batch, 96)
  nn::Network head;     // (batch, 96) -> (batch, 50)
};

/// Glorot-initialized model; encoder and head draw from separate streams.
SimclrModel make_model(const ModelConfig& config, std::uint64_t seed);

/// Inference-mode representation h for a (batch, C, L) tensor.
nn::Tensor encode(const nn::Network& encoder, const nn::Tensor& windows);

nn::Checkpoint to_checkpoint(const SimclrModel& model);
SimclrModel from_checkpoint(const nn::Checkpoint& ckpt);

}  // namespace wearssl::simclr
