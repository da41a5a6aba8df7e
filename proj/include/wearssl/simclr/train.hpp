#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wearssl/augment/augment.hpp"
#include "wearssl/nn/optim.hpp"
#include "wearssl/simclr/model.hpp"

namespace wearssl::simclr {

struct TrainConfig {
  std::size_t batch_size = 1024;
  std::size_t epochs = 1;
  double temperature = 0.5;
  std::optional<double> base_lr;  // unset: 0.3 * batch_size / 256
  nn::LarsConfig lars;
  augment::Pipeline pipeline = augment::simclr_pipeline();
  double norm_floor = 1e-12;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

/// 0.3 * batch_size / 256.
double default_base_lr(std::size_t batch_size);

struct EpochInfo {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::size_t steps = 0;
};

struct TrainResult {
  SimclrModel model;
  std::vector<double> epoch_loss;  // mean NT-Xent per epoch
};

/// Each epoch shuffles the windows, cuts batches of `batch_size` (a trailing
/// batch with fewer than 2 windows is dropped), draws one view pair per
/// window and takes one LARS step per batch at the cosine-scheduled rate.
TrainResult train_simclr(const std::vector<data::Window>& windows, SimclrModel model, const TrainConfig& config,
                         const std::function<void(const EpochInfo&)>& on_epoch = {});

}  // namespace wearssl::simclr
