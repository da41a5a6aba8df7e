#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "suites.hpp"
#include "wearssl/byol/loss.hpp"
#include "wearssl/simclr/nt_xent.hpp"

using namespace wearssl;
using nn::Tensor;

namespace {

Tensor random_rows(std::size_t rows, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Tensor t({rows, d});
  for (double& v : t.values()) v = z(rng);
  return t;
}

Tensor swap_halves(const Tensor& z) {
  const std::size_t n = z.dim(0) / 2;
  return nn::concat_rows(z.slice_rows(n, 2 * n), z.slice_rows(0, n));
}

}  // namespace

TEST_CASE("loss oracles") {
  for (const auto& o : suites::loss_oracle_suite(99)) {
    INFO(o.name << ": " << o.detail);
    CHECK(o.pass);
  }
}

TEST_CASE("nt_xent closed forms") {
  CHECK(simclr::nt_xent(Tensor({4, 5}, 0.3), 0.5) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(simclr::nt_xent(Tensor({4, 5}, 0.3), 0.1) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  const Tensor ortho({4, 2}, {1, 0, 0, 1, 1, 0, 0, 1});
  CHECK(simclr::nt_xent(ortho, 0.5) == doctest::Approx(-std::log(std::exp(2.0) / (std::exp(2.0) + 2.0))));
  CHECK(std::abs(simclr::nt_xent(ortho, 0.5) - 0.239) < 1e-3);
}

TEST_CASE("nt_xent symmetry and invariances") {
  const Tensor z = random_rows(10, 6, 3);
  const double base = simclr::nt_xent(z, 0.5);
  CHECK(simclr::nt_xent(swap_halves(z), 0.5) == doctest::Approx(base).epsilon(1e-12));
  Tensor scaled = z;
  for (double& v : scaled.values()) v *= 7.5;
  CHECK(simclr::nt_xent(scaled, 0.5) == doctest::Approx(base).epsilon(1e-12));
  // Reorder pairs: move pair 0 to the end of both halves.
  const std::size_t n = 5, d = 6;
  Tensor perm({10, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      perm.at(i, k) = z.at((i + 1) % n, k);
      perm.at(i + n, k) = z.at((i + 1) % n + n, k);
    }
  CHECK(simclr::nt_xent(perm, 0.5) == doctest::Approx(base).epsilon(1e-12));
  CHECK(base >= 0.0);
}

TEST_CASE("nt_xent rejects zero-norm rows unless floored") {
  Tensor z = random_rows(4, 3, 4);
  for (std::size_t k = 0; k < 3; ++k) z.at(1, k) = 0.0;
  CHECK_THROWS_AS(simclr::nt_xent(z, 0.5), std::domain_error);
  CHECK_THROWS_AS(simclr::nt_xent_with_grad(z, 0.5), std::domain_error);
  const auto floored = simclr::nt_xent_with_grad(z, 0.5, 1e-12);
  CHECK(std::isfinite(floored.value));
  CHECK(floored.grad.all_finite());
}

TEST_CASE("aligned orthogonal pairs minimize nt_xent among candidates") {
  const std::size_t n = 3, d = 3;
  auto make = [&](auto&& row) {
    Tensor t({2 * n, d});
    for (std::size_t i = 0; i < 2 * n; ++i)
      for (std::size_t k = 0; k < d; ++k) t.at(i, k) = row(i, k);
    return t;
  };
  const Tensor best = make([&](std::size_t i, std::size_t k) { return (i % n) == k ? 1.0 : 0.0; });
  const double opt = simclr::nt_xent(best, 0.5);
  std::vector<Tensor> candidates = {
      make([&](std::size_t, std::size_t k) { return k == 0 ? 1.0 : 0.0; }),
      make([&](std::size_t i, std::size_t k) { return i == k ? 1.0 : (i >= n && k == (i + 1) % n ? 1.0 : 0.0); }),
      make([&](std::size_t i, std::size_t k) { return (i % n) == k ? 1.0 : 0.3; }),
      make([&](std::size_t i, std::size_t k) { return (i % n) == k ? (i < n ? 1.0 : 0.5) : (i < n ? 0.0 : 0.5); }),
      random_rows(2 * n, d, 11),
      random_rows(2 * n, d, 12)};
  for (const auto& c : candidates) CHECK(simclr::nt_xent(c, 0.5) > opt);
}

TEST_CASE("nt_xent is continuous in temperature") {
  const Tensor z = random_rows(8, 5, 5);
  for (double tau : {0.1, 0.5, 1.0}) {
    const double a = simclr::nt_xent(z, tau), b = simclr::nt_xent(z, tau * (1 + 1e-7));
    CHECK(std::abs(a - b) < 1e-5);
  }
}

TEST_CASE("byol_loss worked examples") {
  const Tensor p({1, 2}, {1, 0}), t({1, 2}, {-1, 0});
  CHECK(byol::byol_loss(p, t, p, t) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(byol::byol_loss(p, t, p, t, false) == doctest::Approx(4.0).epsilon(1e-15));
  const Tensor same = random_rows(3, 4, 6);
  CHECK(byol::byol_loss(same, same, same, same) == 0.0);
  const Tensor v1 = random_rows(1, 6, 7), v2 = random_rows(1, 6, 8);
  const double cosine = [&] {
    double dot = 0, a = 0, b = 0;
    for (int k = 0; k < 6; ++k) {
      dot += v1[k] * v2[k];
      a += v1[k] * v1[k];
      b += v2[k] * v2[k];
    }
    return dot / std::sqrt(a * b);
  }();
  CHECK(byol::byol_loss(v1, v2, v1, v2) == doctest::Approx(2 * (2 - 2 * cosine) / 6).epsilon(1e-12));
  Tensor zero({1, 2});
  CHECK_THROWS_AS(byol::byol_loss(zero, t, p, t), std::domain_error);
}

TEST_CASE("byol_loss symmetric under view swap and bounded") {
  const Tensor p = random_rows(8, 5, 9), t = random_rows(8, 5, 10);
  const double a = byol::byol_loss_with_grad(p, t).value;
  CHECK(byol::byol_loss_with_grad(swap_halves(p), swap_halves(t)).value == doctest::Approx(a).epsilon(1e-14));
  CHECK(a >= 0.0);
  CHECK(a <= 8.0);
  std::vector<double> pv(p.values().begin(), p.values().begin() + 5), tv(t.values().begin(), t.values().begin() + 5);
  CHECK(oracle::byol_term(pv, tv, true) <= 4.0);
}

TEST_CASE("ema_update examples") {
  nn::Parameter xi{Tensor({2}, {0.0, 0.0}), Tensor({2}), nn::ParamRole::kWeight};
  const nn::Parameter theta{Tensor({2}, {1.0, -2.0}), Tensor({2}), nn::ParamRole::kWeight};
  nn::Parameter* t[] = {&xi};
  const nn::Parameter* o[] = {&theta};
  byol::ema_update(t, o, 1.0);
  CHECK(xi.value == Tensor({2}, {0.0, 0.0}));
  byol::ema_update(t, o, 0.99);
  CHECK(xi.value[0] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(xi.value[1] == doctest::Approx(-0.02).epsilon(1e-14));
  byol::ema_update(t, o, 0.0);
  CHECK(xi.value == theta.value);
}
