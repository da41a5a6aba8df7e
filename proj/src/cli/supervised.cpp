#include "wearssl/cli/supervised.hpp"

#include <cmath>
#include <stdexcept>

#include "wearssl/augment/augment.hpp"
#include "wearssl/nn/optim.hpp"
#include "wearssl/nn/rng.hpp"
#include "wearssl/simclr/model.hpp"

namespace wearssl::cli {

using nn::Tensor;

SupervisedModel make_supervised(const simclr::ModelConfig& encoder, data::Task task, std::uint64_t seed) {
  auto specs = simclr::encoder_specs(encoder);
  specs.push_back(nn::LayerSpec::dense(data::class_count(task)));
  Rng rng(derive_seed(seed, {0x5e9, static_cast<std::uint64_t>(task)}));
  return {task, nn::Network({encoder.channels, encoder.length}, std::move(specs), rng)};
}

namespace {

nn::LossValue cross_entropy(const Tensor& logits, const std::vector<int>& y) {
  const std::size_t n = logits.dim(0), K = logits.dim(1);
  nn::LossValue out;
  out.grad = Tensor({n, K});
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = logits.data() + i * K;
    double* g = out.grad.data() + i * K;
    double mx = z[0];
    for (std::size_t k = 1; k < K; ++k) mx = std::max(mx, z[k]);
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += std::exp(z[k] - mx);
    const double lse = mx + std::log(sum);
    out.value += lse - z[y[i]];
    for (std::size_t k = 0; k < K; ++k) g[k] = std::exp(z[k] - lse) / static_cast<double>(n);
    g[y[i]] -= 1.0 / static_cast<double>(n);
  }
  out.value /= static_cast<double>(n);
  return out;
}

}  // namespace

SupervisedModel train_supervised(const std::vector<data::Window>& windows, SupervisedModel model,
                                 const SupervisedSection& config, std::uint64_t seed,
                                 std::vector<double>* epoch_loss) {
  if (windows.empty()) throw std::invalid_argument("supervised training needs windows");
  const std::size_t B = config.batch_size;
  nn::Adam adam;
  auto params = model.net.parameters();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = augment::epoch_order(windows.size(), seed, epoch);
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start + 2 <= order.size(); start += B) {
      const std::size_t end = std::min(order.size(), start + B);
      std::vector<const data::Window*> batch;
      std::vector<int> y;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&windows[order[i]]);
        y.push_back(data::label_of(windows[order[i]].labels, model.task));
      }
      Rng rng(derive_seed(seed, {0xd1, epoch, steps}));
      total += nn::compute_gradients(
          model.net, data::batch_values(batch), [&](const Tensor& logits) { return cross_entropy(logits, y); },
          nn::Mode::kTraining, rng);
      adam.step(params, config.lr);
      ++steps;
    }
    if (epoch_loss) epoch_loss->push_back(steps ? total / static_cast<double>(steps) : 0.0);
  }
  return model;
}

std::vector<int> predict(const SupervisedModel& model, const std::vector<data::Window>& windows) {
  std::vector<int> out;
  out.reserve(windows.size());
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < windows.size(); start += kChunk) {
    std::vector<const data::Window*> batch;
    for (std::size_t i = start; i < std::min(windows.size(), start + kChunk); ++i) batch.push_back(&windows[i]);
    const Tensor logits = model.net.infer(data::batch_values(batch));
    const std::size_t K = logits.dim(1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double* z = logits.data() + i * K;
      out.push_back(static_cast<int>(std::max_element(z, z + K) - z));
    }
  }
  return out;
}

nn::Checkpoint to_checkpoint(const SupervisedModel& model) {
  nn::Checkpoint c;
  c.kind = "supervised";
  c.attributes["task"] = std::string(data::task_name(model.task));
  c.networks.emplace_back("classifier", model.net);
  return c;
}

SupervisedModel supervised_from_checkpoint(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "supervised") throw std::invalid_argument("checkpoint kind '" + ckpt.kind + "' is not supervised");
  const auto it = ckpt.attributes.find("task");
  const auto task = it == ckpt.attributes.end() ? std::nullopt : data::parse_task(it->second);
  if (!task) throw std::invalid_argument("supervised checkpoint has no valid task attribute");
  return {*task, ckpt.network("classifier")};
}

}  // namespace wearssl::cli
