#include "wearssl/simclr/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wearssl/simclr/nt_xent.hpp"

namespace wearssl::simclr {

void validate(const TrainConfig& c) {
  if (c.batch_size < 2) throw std::invalid_argument("simclr.batch_size must be >= 2");
  if (!(c.temperature > 0.0)) throw std::invalid_argument("simclr.temperature must be > 0");
  if (c.base_lr && !(*c.base_lr >= 0.0)) throw std::invalid_argument("simclr.base_lr must be >= 0");
  if (!(c.norm_floor >= 0.0)) throw std::invalid_argument("simclr.norm_floor must be >= 0");
}

double default_base_lr(std::size_t batch_size) { return 0.3 * static_cast<double>(batch_size) / 256.0; }

TrainResult train_simclr(const std::vector<data::Window>& windows, SimclrModel model, const TrainConfig& config,
                         const std::function<void(const EpochInfo&)>& on_epoch) {
  validate(config);
  if (!windows.empty()) augment::validate(config.pipeline, windows.front().length());
  const std::size_t steps = augment::steps_per_epoch(windows.size(), config.batch_size);
  const auto total = static_cast<std::int64_t>(steps * config.epochs);
  const double base_lr = config.base_lr.value_or(default_base_lr(config.batch_size));

  nn::Lars lars(config.lars);
  std::vector<nn::Parameter*> params = model.encoder.parameters();
  for (nn::Parameter* p : model.head.parameters()) params.push_back(p);

  TrainResult result;
  std::int64_t global_step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = augment::epoch_order(windows.size(), config.seed, epoch);
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t begin = s * config.batch_size;
      const std::size_t end = std::min(begin + config.batch_size, windows.size());
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
      const nn::Tensor batch = augment::view_pair_batch(windows, idx, config.pipeline, config.seed, epoch);

      Rng dropout_rng(derive_seed(config.seed, {0xd0, epoch, s}));
      model.encoder.zero_grad();
      model.head.zero_grad();
      const nn::Tensor h = model.encoder.forward(batch, nn::Mode::kTraining, dropout_rng);
      const nn::Tensor z = model.head.forward(h, nn::Mode::kTraining, dropout_rng);
      const nn::LossValue loss = nt_xent_with_grad(z, config.temperature, config.norm_floor);
      if (!std::isfinite(loss.value)) throw nn::NonFiniteLoss(loss.value);
      model.encoder.backward(model.head.backward(loss.grad));

      lars.step(params, nn::cosine_lr(global_step, total, base_lr));
      ++global_step;
      loss_sum += loss.value;
    }
    const double mean = steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0;
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch({epoch, mean, steps});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace wearssl::simclr
