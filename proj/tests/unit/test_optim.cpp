#include <doctest.h>

#include <cmath>

#include "wearssl/nn/optim.hpp"

using namespace wearssl;
using nn::Parameter;
using nn::Tensor;

namespace {

Parameter scalar(double value, double grad, nn::ParamRole role = nn::ParamRole::kWeight) {
  return {Tensor({1}, std::vector<double>{value}), Tensor({1}, std::vector<double>{grad}), role};
}

}  // namespace

TEST_CASE("cosine schedule") {
  CHECK(nn::cosine_lr(0, 100, 1.2) == 1.2);
  CHECK(0.3 * 1024 / 256 == 1.2);
  CHECK(nn::cosine_lr(100, 100, 1.2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(nn::cosine_lr(50, 100, 0.8) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(nn::cosine_lr(150, 100, 0.8) == 0.0);
  double prev = 1e9;
  for (int s = 0; s <= 37; ++s) {
    const double lr = nn::cosine_lr(s, 37, 2.0);
    CHECK(lr <= prev);
    prev = lr;
  }
}

TEST_CASE("LARS hand-evaluated step") {
  Parameter w = scalar(2.0, 1.0);
  nn::LarsConfig cfg;
  cfg.weight_decay = 0.0;
  cfg.momentum = 0.0;
  cfg.trust_coefficient = 0.001;
  nn::Lars opt(cfg);
  Parameter* ps[] = {&w};
  opt.step(ps, 1.0);
  CHECK(w.value[0] == doctest::Approx(1.998).epsilon(1e-9));
}

TEST_CASE("LARS leaves parameters alone for zero gradient and zero momentum") {
  Parameter w = scalar(3.0, 0.0), b = scalar(0.5, 0.0, nn::ParamRole::kBias);
  nn::LarsConfig cfg;
  cfg.weight_decay = 0.0;
  nn::Lars opt(cfg);
  Parameter* ps[] = {&w, &b};
  opt.step(ps, 0.7);
  CHECK(w.value[0] == 3.0);
  CHECK(b.value[0] == 0.5);
}

TEST_CASE("LARS trust ratio is scale invariant and defined at zero norms") {
  nn::LarsConfig cfg;
  cfg.weight_decay = 0.0;
  CHECK(nn::lars_trust_ratio(2.0, 1.0, cfg) == doctest::Approx(nn::lars_trust_ratio(20.0, 10.0, cfg)).epsilon(1e-8));
  const double zero = nn::lars_trust_ratio(0.0, 0.0, cfg);
  CHECK(zero == 1.0);
  CHECK(std::isfinite(nn::lars_trust_ratio(0.0, 5.0, cfg)));
  CHECK(std::isfinite(nn::lars_trust_ratio(5.0, 0.0, cfg)));
}

TEST_CASE("Adam first step moves by lr against the gradient sign") {
  Parameter p = scalar(0.0, 1.0);
  nn::Adam opt;
  Parameter* ps[] = {&p};
  opt.step(ps, 0.001);
  CHECK(p.value[0] == doctest::Approx(-0.001).epsilon(1e-6));
  CHECK(opt.state().step == 1);

  Parameter q = scalar(1.0, -3.0);
  nn::Adam o2;
  Parameter* qs[] = {&q};
  o2.step(qs, 0.01);
  CHECK(q.value[0] == doctest::Approx(1.01).epsilon(1e-8));
}

TEST_CASE("Adam ignores zero gradients from a fresh state") {
  Parameter p = scalar(0.25, 0.0);
  nn::Adam opt;
  Parameter* ps[] = {&p};
  opt.step(ps, 0.1);
  CHECK(p.value[0] == 0.25);
}

TEST_CASE("Adam bias correction keeps the second step as large as the first") {
  Parameter p = scalar(0.0, 1.0);
  nn::Adam opt;
  Parameter* ps[] = {&p};
  opt.step(ps, 0.001);
  const double first = std::abs(p.value[0]);
  const double before = p.value[0];
  p.grad[0] = 1.0;
  opt.step(ps, 0.001);
  CHECK(std::abs(p.value[0] - before) >= 0.999 * first);
}

TEST_CASE("Adam minimizes a convex quadratic") {
  // f(x, y) = 3 (x - 1)^2 + (y + 2)^2 + x y
  auto f = [](double x, double y) { return 3 * (x - 1) * (x - 1) + (y + 2) * (y + 2) + x * y; };
  const double fmin = [] {
    // grad = 0: 6x - 6 + y = 0, 2y + 4 + x = 0 -> x = 16/11, y = -30/11
    const double x = 16.0 / 11.0, y = -30.0 / 11.0;
    return 3 * (x - 1) * (x - 1) + (y + 2) * (y + 2) + x * y;
  }();
  Parameter p{Tensor({2}, std::vector<double>{-3.0, 4.0}), Tensor({2}), nn::ParamRole::kWeight};
  nn::Adam opt;
  Parameter* ps[] = {&p};
  const double start = f(p.value[0], p.value[1]) - fmin;
  for (int i = 0; i < 200; ++i) {
    const double x = p.value[0], y = p.value[1];
    p.grad[0] = 6 * (x - 1) + y;
    p.grad[1] = 2 * (y + 2) + x;
    opt.step(ps, 0.05);
  }
  const double end = f(p.value[0], p.value[1]) - fmin;
  CHECK(end <= 0.01 * start);
}
