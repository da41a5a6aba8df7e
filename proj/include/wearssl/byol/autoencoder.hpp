#pragma once

#include <cstdint>
#include <vector>

#include "wearssl/data/types.hpp"
#include "wearssl/nn/checkpoint.hpp"
#include "wearssl/nn/network.hpp"

namespace wearssl::byol {

/// Per-channel affine map onto [0, 1], fitted on training windows. A
/// channel with no range maps to 0.5.
struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;
};

MinMaxScaler fit_min_max(const std::vector<data::Window>& windows);

/// Applies the scaler to a (C, L) or (batch, C, L) tensor.
nn::Tensor scale(const MinMaxScaler& scaler, const nn::Tensor& x);
std::vector<data::Window> scale(const MinMaxScaler& scaler, std::vector<data::Window> windows);

struct AutoencoderConfig {
  std::vector<std::size_t> widths = {1024, 512, 256, 128};
};

/// dense widths[0] -> relu -> ... -> dense widths.back(). The bottleneck is
/// linear; its relu opens the decoder.
std::vector<nn::LayerSpec> encoder_specs(const AutoencoderConfig& config);
/// relu -> dense ... -> dense input_features -> sigmoid, mirroring the encoder.
std::vector<nn::LayerSpec> decoder_specs(const AutoencoderConfig& config, std::size_t input_features);

struct Autoencoder {
  nn::Network encoder;  // (batch, C, L) -> (batch, widths.back())
  nn::Network decoder;  // (batch, widths.back()) -> (batch, C*L)
  MinMaxScaler scaler;
};

Autoencoder make_autoencoder(const AutoencoderConfig& config, nn::Shape sample_shape, MinMaxScaler scaler,
                             std::uint64_t seed);

struct AutoencoderTrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct AutoencoderResult {
  Autoencoder model;
  double initial_mse = 0.0;         // over the whole dataset, before training
  std::vector<double> epoch_loss;   // mean batch MSE per epoch
  double final_mse = 0.0;           // over the whole dataset, after training
};

/// Reconstruction MSE of `windows` (already scaled) averaged over every value.
double reconstruction_mse(const Autoencoder& ae, const std::vector<data::Window>& scaled_windows);

/// Fits the scaler on `windows`, then trains encoder and decoder with Adam
/// on the mean squared reconstruction error. Throws std::domain_error when a
/// scaled value falls outside [0, 1].
AutoencoderResult pretrain_autoencoder(const std::vector<data::Window>& windows, const AutoencoderConfig& config,
                                       const AutoencoderTrainConfig& train);

/// Same, starting from an existing model and scaler.
AutoencoderResult pretrain_autoencoder(const std::vector<data::Window>& windows, Autoencoder model,
                                       const AutoencoderTrainConfig& train);

nn::Checkpoint to_checkpoint(const Autoencoder& ae);
Autoencoder autoencoder_from_checkpoint(const nn::Checkpoint& ckpt);

}  // namespace wearssl::byol
