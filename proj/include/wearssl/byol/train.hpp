#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wearssl/augment/augment.hpp"
#include "wearssl/byol/model.hpp"
#include "wearssl/nn/optim.hpp"

namespace wearssl::byol {

enum class OptimizerKind { kAdam, kLars };

struct TrainConfig {
  std::size_t batch_size = 1024;
  std::size_t epochs = 1;
  std::optional<double> base_lr;  // unset: 0.2 * batch_size / 256
  OptimizerKind optimizer = OptimizerKind::kAdam;
  nn::AdamConfig adam;
  nn::LarsConfig lars;
  double beta = 0.99;
  bool normalize_loss = true;
  augment::Pipeline pipeline = augment::byol_pipeline();
  double norm_floor = 1e-12;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

/// 0.2 * batch_size / 256.
double default_base_lr(std::size_t batch_size);

struct StepInfo {
  std::size_t epoch = 0;
  std::size_t step = 0;  // global, counted from 0
  double loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  ByolModel model;
  std::vector<double> epoch_loss;
};

/// Observer called after every step (optimizer update and EMA applied).
using StepObserver = std::function<void(const StepInfo&, const ByolModel&)>;

/// Both views of a batch run through the online and target networks as one
/// stacked (2B, ...) batch. Only the online networks receive gradients; the
/// target follows by EMA after each optimizer step. Windows are scaled with
/// the model's scaler before augmentation.
TrainResult train_byol(const std::vector<data::Window>& windows, ByolModel model, const TrainConfig& config,
                       const StepObserver& on_step = {});

}  // namespace wearssl::byol
