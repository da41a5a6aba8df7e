#include "wearssl/byol/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wearssl/byol/loss.hpp"

namespace wearssl::byol {

void validate(const TrainConfig& c) {
  if (c.batch_size < 2) throw std::invalid_argument("byol.batch_size must be >= 2");
  if (c.base_lr && !(*c.base_lr >= 0.0)) throw std::invalid_argument("byol.base_lr must be >= 0");
  if (!(c.beta >= 0.0 && c.beta <= 1.0)) throw std::invalid_argument("byol.beta must lie in [0, 1]");
  if (!(c.norm_floor >= 0.0)) throw std::invalid_argument("byol.norm_floor must be >= 0");
}

double default_base_lr(std::size_t batch_size) { return 0.2 * static_cast<double>(batch_size) / 256.0; }

TrainResult train_byol(const std::vector<data::Window>& windows, ByolModel model, const TrainConfig& config,
                       const StepObserver& on_step) {
  validate(config);
  if (!windows.empty()) augment::validate(config.pipeline, windows.front().length());
  const std::vector<data::Window> scaled = scale(model.scaler, windows);
  const std::size_t steps = augment::steps_per_epoch(scaled.size(), config.batch_size);
  const auto total = static_cast<std::int64_t>(steps * config.epochs);
  const double base_lr = config.base_lr.value_or(default_base_lr(config.batch_size));

  nn::Adam adam(config.adam);
  nn::Lars lars(config.lars);
  const std::vector<nn::Parameter*> online = online_parameters(model);
  const std::vector<nn::Parameter*> target = target_parameters(model);
  const std::vector<const nn::Parameter*> tracked = online_tracked(model);

  TrainResult result;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = augment::epoch_order(scaled.size(), config.seed, epoch);
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t begin = s * config.batch_size;
      const std::size_t end = std::min(begin + config.batch_size, scaled.size());
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
      const nn::Tensor batch = augment::view_pair_batch(scaled, idx, config.pipeline, config.seed, epoch);

      Rng rng(derive_seed(config.seed, {0xb0, epoch, s}));
      for (nn::Network* n : {&model.encoder, &model.projector, &model.predictor}) n->zero_grad();
      const nn::Tensor p = model.predictor.forward(
          model.projector.forward(model.encoder.forward(batch, nn::Mode::kTraining, rng), nn::Mode::kTraining, rng),
          nn::Mode::kTraining, rng);
      const nn::Tensor t = model.target_projector.forward(
          model.target_encoder.forward(batch, nn::Mode::kTraining, rng), nn::Mode::kTraining, rng);
      const nn::LossValue loss = byol_loss_with_grad(p, t, config.normalize_loss, config.norm_floor);
      if (!std::isfinite(loss.value)) throw nn::NonFiniteLoss(loss.value);
      model.encoder.backward(model.projector.backward(model.predictor.backward(loss.grad)));

      const double lr = nn::cosine_lr(static_cast<std::int64_t>(global_step), total, base_lr);
      if (config.optimizer == OptimizerKind::kAdam)
        adam.step(online, lr);
      else
        lars.step(online, lr);
      ema_update(target, tracked, config.beta);

      if (on_step) on_step({epoch, global_step, loss.value, lr}, model);
      ++global_step;
      loss_sum += loss.value;
    }
    result.epoch_loss.push_back(steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace wearssl::byol
