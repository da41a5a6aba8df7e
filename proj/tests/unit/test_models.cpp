#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "wearssl/byol/autoencoder.hpp"
#include "wearssl/byol/loss.hpp"
#include "wearssl/byol/model.hpp"
#include "wearssl/byol/train.hpp"
#include "wearssl/nn/checkpoint.hpp"
#include "wearssl/simclr/model.hpp"
#include "wearssl/simclr/train.hpp"

using namespace wearssl;
using data::Window;
using nn::Tensor;

namespace {

std::vector<Window> random_windows(std::size_t n, std::size_t channels, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  std::vector<Window> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].values = Tensor({channels, length});
    for (std::size_t k = 0; k < out[i].values.size(); ++k) out[i].values[k] = z(rng);
    out[i].participant_id = "P" + std::to_string(i % 4);
  }
  return out;
}

simclr::ModelConfig small_simclr() {
  simclr::ModelConfig c;
  c.length = 64;
  c.feature_maps = {4, 6, 8};
  c.kernels = {8, 6, 4};
  c.head_widths = {16, 8};
  return c;
}

byol::ModelConfig small_byol() {
  byol::ModelConfig c;
  c.encoder.widths = {32, 16};
  c.projector_hidden = 24;
  c.projection_dim = 8;
  return c;
}

}  // namespace

TEST_CASE("simclr encoder and head dimensions") {
  const auto m = simclr::make_model({}, 1);
  CHECK(m.encoder.output_shape() == nn::Shape{96});
  CHECK(m.head.output_shape() == nn::Shape{50});
  CHECK(simclr::receptive_field({}) == 46);
  simclr::ModelConfig short_cfg;
  short_cfg.length = 45;
  CHECK_THROWS(simclr::make_model(short_cfg, 1));
  short_cfg.length = 46;
  CHECK(simclr::make_model(short_cfg, 1).encoder.output_shape() == nn::Shape{96});
}

TEST_CASE("simclr encoder: zero window with zero biases gives zero embedding") {
  auto m = simclr::make_model({}, 2);
  for (auto* p : m.encoder.parameters())
    if (p->value.rank() == 1) p->value = Tensor(p->value.shape());
  const Tensor h = simclr::encode(m.encoder, Tensor({2, 3, 512}));
  for (double v : h.values()) CHECK(v == 0.0);
}

TEST_CASE("simclr encoder: duplicate rows embed identically") {
  const auto m = simclr::make_model(small_simclr(), 3);
  const auto w = random_windows(1, 3, 64, 4);
  Tensor x({2, 3, 64});
  for (std::size_t k = 0; k < 3 * 64; ++k) x[k] = x[3 * 64 + k] = w[0].values[k];
  const Tensor h = simclr::encode(m.encoder, x);
  for (std::size_t j = 0; j < h.dim(1); ++j) CHECK(h.at(0, j) == h.at(1, j));
}

TEST_CASE("simclr training: zero learning rate leaves weights unchanged") {
  const auto windows = random_windows(12, 3, 64, 5);
  auto model = simclr::make_model(small_simclr(), 6);
  const auto before = nn::parameter_hash(model.encoder) ^ nn::parameter_hash(model.head);
  simclr::TrainConfig cfg;
  cfg.batch_size = 6;
  cfg.epochs = 2;
  cfg.base_lr = 0.0;
  cfg.lars.weight_decay = 0.0;
  const auto r = simclr::train_simclr(windows, std::move(model), cfg);
  CHECK((nn::parameter_hash(r.model.encoder) ^ nn::parameter_hash(r.model.head)) == before);
  CHECK(r.epoch_loss.size() == 2);
}

TEST_CASE("simclr training is deterministic for a seed") {
  const auto windows = random_windows(12, 3, 64, 7);
  simclr::TrainConfig cfg;
  cfg.batch_size = 6;
  cfg.epochs = 2;
  cfg.seed = 9;
  const auto a = simclr::train_simclr(windows, simclr::make_model(small_simclr(), 8), cfg);
  const auto b = simclr::train_simclr(windows, simclr::make_model(small_simclr(), 8), cfg);
  CHECK(nn::parameter_hash(a.model.encoder) == nn::parameter_hash(b.model.encoder));
  CHECK(a.epoch_loss == b.epoch_loss);
  cfg.seed = 10;
  const auto c = simclr::train_simclr(windows, simclr::make_model(small_simclr(), 8), cfg);
  CHECK(nn::parameter_hash(a.model.encoder) != nn::parameter_hash(c.model.encoder));
}

TEST_CASE("simclr checkpoint round trip") {
  const auto m = simclr::make_model(small_simclr(), 11);
  const auto path = std::filesystem::temp_directory_path() / "wearssl_simclr_test.ckpt";
  nn::save_checkpoint(simclr::to_checkpoint(m), path);
  const auto back = simclr::from_checkpoint(nn::load_checkpoint(path));
  std::filesystem::remove(path);
  const auto w = random_windows(3, 3, 64, 12);
  const Tensor x = data::batch_values(w);
  CHECK(simclr::encode(back.encoder, x) == simclr::encode(m.encoder, x));
  CHECK(nn::parameter_hash(back.head) == nn::parameter_hash(m.head));
}

TEST_CASE("default learning rates follow the linear scaling rule") {
  CHECK(simclr::default_base_lr(1024) == doctest::Approx(1.2));
  CHECK(byol::default_base_lr(1024) == doctest::Approx(0.8));
  CHECK(simclr::default_base_lr(256) == doctest::Approx(0.3));
}

TEST_CASE("min-max scaler") {
  auto w = random_windows(5, 2, 10, 13);
  for (auto& x : w)
    for (std::size_t k = 10; k < 20; ++k) x.values[k] = 4.0;  // constant channel
  const auto s = byol::fit_min_max(w);
  const auto scaled = byol::scale(s, w);
  double lo = 1, hi = 0;
  for (const auto& x : scaled)
    for (std::size_t k = 0; k < 10; ++k) lo = std::min(lo, x.values[k]), hi = std::max(hi, x.values[k]);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));
  for (std::size_t k = 10; k < 20; ++k) CHECK(scaled[0].values[k] == 0.5);
}

TEST_CASE("autoencoder: zero epochs returns the initialization") {
  const auto w = random_windows(8, 2, 16, 14);
  byol::AutoencoderTrainConfig t;
  t.epochs = 0;
  t.seed = 3;
  const auto a = byol::pretrain_autoencoder(w, byol::AutoencoderConfig{{16, 8}}, t);
  const auto fresh = byol::make_autoencoder({{16, 8}}, {2, 16}, byol::fit_min_max(w), 3);
  CHECK(nn::parameter_hash(a.model.encoder) == nn::parameter_hash(fresh.encoder));
  CHECK(a.epoch_loss.empty());
  CHECK(a.final_mse == a.initial_mse);
}

TEST_CASE("autoencoder on constant-valued windows beats the mean predictor") {
  // Each window is flat at its own level; predicting the dataset mean scores
  // the variance of the scaled levels.
  std::vector<Window> w(16);
  std::vector<double> levels;
  for (std::size_t i = 0; i < w.size(); ++i) {
    levels.push_back(-2.0 + 0.3 * static_cast<double>(i));
    w[i].values = Tensor({2, 16}, levels.back());
  }
  const double lo = levels.front(), hi = levels.back();
  double mean = 0, mean_predictor = 0;
  for (double c : levels) mean += (c - lo) / (hi - lo) / static_cast<double>(levels.size());
  for (double c : levels) mean_predictor += std::pow((c - lo) / (hi - lo) - mean, 2) / static_cast<double>(levels.size());

  byol::AutoencoderTrainConfig t;
  t.epochs = 300;
  t.batch_size = 8;
  t.lr = 1e-2;
  const auto r = byol::pretrain_autoencoder(w, byol::AutoencoderConfig{{16, 4}}, t);
  INFO("mean predictor " << mean_predictor << " autoencoder " << r.final_mse);
  CHECK(r.final_mse <= mean_predictor);
}

TEST_CASE("autoencoder checkpoint round trip") {
  const auto w = random_windows(4, 2, 16, 15);
  const auto ae = byol::make_autoencoder({{16, 8}}, {2, 16}, byol::fit_min_max(w), 4);
  const auto back = byol::autoencoder_from_checkpoint(byol::to_checkpoint(ae));
  CHECK(nn::parameter_hash(back.encoder) == nn::parameter_hash(ae.encoder));
  CHECK(nn::parameter_hash(back.decoder) == nn::parameter_hash(ae.decoder));
  CHECK(back.scaler.min == ae.scaler.min);
  CHECK(back.scaler.max == ae.scaler.max);
}

TEST_CASE("byol: zero learning rate with beta 1 changes nothing") {
  const auto w = random_windows(12, 2, 16, 16);
  auto m = byol::make_random_model(small_byol(), {2, 16}, byol::fit_min_max(w), 17);
  const auto online = nn::parameter_hash(byol::online_tracked(m));
  const auto target = nn::parameter_hash(byol::target_tracked(m));
  CHECK(online == target);
  byol::TrainConfig cfg;
  cfg.batch_size = 6;
  cfg.epochs = 2;
  cfg.base_lr = 0.0;
  cfg.beta = 1.0;
  const auto r = byol::train_byol(w, std::move(m), cfg);
  CHECK(nn::parameter_hash(byol::online_tracked(r.model)) == online);
  CHECK(nn::parameter_hash(byol::target_tracked(r.model)) == target);
}

TEST_CASE("byol: target equals the replayed EMA of the online weights") {
  const auto w = random_windows(12, 2, 16, 18);
  auto m = byol::make_random_model(small_byol(), {2, 16}, byol::fit_min_max(w), 19);
  // Independent replay: keep our own copy of the target and apply the EMA
  // recurrence to the online weights seen after each step.
  std::vector<std::vector<double>> replay;
  for (const auto* p : byol::target_tracked(m)) { const auto v = p->value.values(); replay.emplace_back(v.begin(), v.end()); }
  const double beta = 0.9;
  bool all_match = true;
  std::size_t steps = 0;
  byol::TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.epochs = 2;
  cfg.beta = beta;
  cfg.base_lr = 1e-3;
  byol::train_byol(w, std::move(m), cfg, [&](const byol::StepInfo&, const byol::ByolModel& model) {
    const auto online = byol::online_tracked(model);
    const auto target = byol::target_tracked(model);
    for (std::size_t i = 0; i < online.size(); ++i) {
      const auto o = online[i]->value.values();
      for (std::size_t k = 0; k < o.size(); ++k) replay[i][k] = beta * replay[i][k] + (1.0 - beta) * o[k];
      const auto t = target[i]->value.values();
      for (std::size_t k = 0; k < t.size(); ++k)
        if (std::abs(t[k] - replay[i][k]) > 1e-12 * (1.0 + std::abs(t[k]))) all_match = false;
    }
    ++steps;
  });
  CHECK(steps == 6);
  CHECK(all_match);
}

TEST_CASE("byol: checkpoint round trip") {
  const auto w = random_windows(4, 2, 16, 20);
  const auto m = byol::make_random_model(small_byol(), {2, 16}, byol::fit_min_max(w), 21);
  const auto back = byol::from_checkpoint(byol::to_checkpoint(m));
  const Tensor x = data::batch_values(w);
  CHECK(byol::encode(back, x) == byol::encode(m, x));
  CHECK(nn::parameter_hash(byol::target_tracked(back)) == nn::parameter_hash(byol::target_tracked(m)));
  CHECK(nn::parameter_hash(back.predictor) == nn::parameter_hash(m.predictor));
}
