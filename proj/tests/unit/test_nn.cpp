#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "suites.hpp"
#include "wearssl/nn/checkpoint.hpp"
#include "wearssl/nn/network.hpp"
#include "wearssl/nn/rng.hpp"

using namespace wearssl;
using nn::LayerSpec;
using nn::Mode;
using nn::Network;
using nn::Tensor;

TEST_CASE("tensor shape bookkeeping") {
  Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.dim(1) == 3);
  CHECK(t.reshaped({3, 2}).dim(0) == 3);
  CHECK_THROWS(t.reshaped({4, 2}));
  CHECK_THROWS(Tensor({2, 2}, std::vector<double>{1, 2, 3}));
  CHECK(nn::concat_rows(t, t).dim(0) == 4);
  CHECK(t.slice_rows(1, 2).size() == 3);
}

TEST_CASE("identity network passes batches through") {
  Network id;
  Rng rng(1);
  Tensor x({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(id.forward(x, Mode::kTraining, rng) == x);
  CHECK(id.infer(x) == x);
}

TEST_CASE("conv stack shape arithmetic") {
  Rng rng(2);
  Network net({3, 512},
              {LayerSpec::conv1d(32, 24), LayerSpec::conv1d(64, 16), LayerSpec::conv1d(96, 8),
               LayerSpec::global_max_pool()},
              rng);
  CHECK(net.output_shape() == nn::Shape{96});
  Network c1({3, 512}, {LayerSpec::conv1d(32, 24)}, rng);
  CHECK(c1.output_shape() == nn::Shape{32, 489});
  Network c2({32, 489}, {LayerSpec::conv1d(64, 16)}, rng);
  CHECK(c2.output_shape() == nn::Shape{64, 474});
  Network c3({64, 474}, {LayerSpec::conv1d(96, 8)}, rng);
  CHECK(c3.output_shape() == nn::Shape{96, 467});
  Network strided({1, 20}, {LayerSpec::conv1d(2, 4, 3)}, rng);
  CHECK(strided.output_shape() == nn::Shape{2, (20 - 4) / 3 + 1});
  CHECK(net.infer(Tensor({2, 3, 512}, 0.5)).shape() == nn::Shape{2, 96});
}

TEST_CASE("layer spec validation") {
  CHECK_THROWS(nn::validate(LayerSpec::conv1d(4, 3, 0)));
  CHECK_THROWS(nn::validate(LayerSpec::dropout(1.0)));
  CHECK_THROWS(nn::validate(LayerSpec::dropout(-0.1)));
  CHECK_THROWS(nn::validate(LayerSpec::dense(0)));
  CHECK_NOTHROW(nn::validate(LayerSpec::dropout(0.0)));
}

TEST_CASE("shape mismatch names the layer") {
  Rng rng(3);
  Network net({2, 10}, {LayerSpec::conv1d(4, 3), LayerSpec::relu(), LayerSpec::dense(2)}, rng);
  try {
    net.infer(Tensor({1, 3, 10}));
    FAIL("expected ShapeError");
  } catch (const nn::ShapeError& e) {
    CHECK(e.layer_index() == 0);
  }
  try {
    Network bad({2, 10}, {LayerSpec::relu(), LayerSpec::conv1d(4, 30)}, rng);
    FAIL("expected ShapeError");
  } catch (const nn::ShapeError& e) {
    CHECK(e.layer_index() == 1);
  }
}

TEST_CASE("dropout is the identity at inference") {
  Rng rng(4);
  Network net({16}, {LayerSpec::dropout(0.1)}, rng);
  Tensor x({3, 16});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(i) - 1.0;
  CHECK(net.forward(x, Mode::kInference, rng) == x);
  CHECK(net.infer(x) == x);
  const Tensor y = net.forward(x, Mode::kTraining, rng);
  bool dropped = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0.0 && x[i] != 0.0) dropped = true;
    if (y[i] != 0.0) CHECK(y[i] == doctest::Approx(x[i] / 0.9).epsilon(1e-15));
  }
  CHECK(dropped);
}

TEST_CASE("dense gradient of sum(Wx) is x") {
  Rng rng(5);
  Network net({3}, {LayerSpec::dense(2)}, rng);
  const Tensor x({1, 3}, std::vector<double>{0.5, -1.25, 2.0});
  nn::compute_gradients(
      net, x,
      [](const Tensor& y) {
        return nn::LossValue{y[0] + y[1], Tensor(y.shape(), 1.0)};
      },
      Mode::kTraining, rng);
  const auto& w = net.parameters()[0]->grad;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(w.at(i, j) == x[j]);
}

TEST_CASE("relu passes gradient at positive pre-activations") {
  Rng rng(6);
  Network net({4}, {LayerSpec::relu()}, rng);
  const Tensor x({1, 4}, std::vector<double>{0.3, 1.0, 2.0, 5.0});
  net.forward(x, Mode::kTraining, rng);
  const Tensor g({1, 4}, std::vector<double>{1.0, -2.0, 3.0, 0.5});
  CHECK(net.backward(g) == g);
}

TEST_CASE("non-finite loss is reported with its value") {
  Rng rng(7);
  Network net({2}, {LayerSpec::dense(1)}, rng);
  try {
    nn::compute_gradients(
        net, Tensor({1, 2}, 1.0),
        [](const Tensor& y) { return nn::LossValue{std::numeric_limits<double>::infinity(), Tensor(y.shape())}; },
        Mode::kTraining, rng);
    FAIL("expected NonFiniteLoss");
  } catch (const nn::NonFiniteLoss& e) {
    CHECK(std::isinf(e.value()));
  }
}

TEST_CASE("finite-difference gradient checks, 50 cases per op") {
  for (const auto& g : suites::gradient_suite(50, 20240101)) {
    INFO(g.op << " worst relative error " << g.worst);
    CHECK(g.cases >= 50);
    CHECK(g.worst <= 1e-4);
  }
}

TEST_CASE("batchnorm running statistics move only in training mode") {
  Rng rng(8);
  Network net({3}, {LayerSpec::batchnorm1d()}, rng);
  Tensor x({4, 3});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i * i % 7);
  const auto before = nn::fingerprint(*net.buffers()[0]);
  net.forward(x, Mode::kInference, rng);
  net.infer(x);
  CHECK(nn::fingerprint(*net.buffers()[0]) == before);
  net.forward(x, Mode::kTraining, rng);
  CHECK(nn::fingerprint(*net.buffers()[0]) != before);
}

TEST_CASE("glorot initialization bounds and zero biases") {
  Rng rng(9);
  Network net({10}, {LayerSpec::dense(6)}, rng);
  const double bound = std::sqrt(6.0 / 16.0);
  for (double v : net.parameters()[0]->value.values()) CHECK(std::abs(v) <= bound);
  for (double v : net.parameters()[1]->value.values()) CHECK(v == 0.0);
}

TEST_CASE("derive_seed is a pure function of its path") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("checkpoint round trip is bitwise") {
  Rng rng(10);
  nn::Checkpoint c;
  c.kind = "test";
  c.attributes["a"] = "b";
  c.arrays["xs"] = {1.0, -0.0, 1e-300};
  c.networks.emplace_back("net", Network({2, 12}, {LayerSpec::conv1d(3, 4), LayerSpec::relu(),
                                                   LayerSpec::dropout(0.2), LayerSpec::global_max_pool(),
                                                   LayerSpec::dense(4), LayerSpec::batchnorm1d(),
                                                   LayerSpec::sigmoid()},
                                         rng));
  c.rng_state = "state";
  const auto path = std::filesystem::temp_directory_path() / "wearssl_ckpt_test.ckpt";
  nn::save_checkpoint(c, path);
  const auto back = nn::load_checkpoint(path);
  CHECK(back.kind == "test");
  CHECK(back.attributes == c.attributes);
  CHECK(back.arrays.at("xs") == c.arrays.at("xs"));
  CHECK(back.rng_state == "state");
  CHECK(nn::parameter_hash(back.network("net")) == nn::parameter_hash(c.network("net")));
  CHECK(back.network("net").specs() == c.network("net").specs());
  const Tensor x({1, 2, 12}, 0.25);
  CHECK(back.network("net").infer(x) == c.network("net").infer(x));
  std::filesystem::remove(path);

  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTACKPT";
  }
  CHECK_THROWS(nn::load_checkpoint(path));
  std::filesystem::remove(path);
}
