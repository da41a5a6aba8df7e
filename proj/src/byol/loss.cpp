#include "wearssl/byol/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace wearssl::byol {

using nn::Tensor;

namespace {

std::pair<std::size_t, std::size_t> rows_and_dim(const Tensor& t) {
  if (t.rank() == 1) return {1, t.dim(0)};
  if (t.rank() == 2) return {t.dim(0), t.dim(1)};
  throw std::invalid_argument("byol_loss expects (batch, d) or (d) tensors, got " + nn::to_string(t.shape()));
}

double row_norm(const double* p, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) s += p[j] * p[j];
  return std::sqrt(s);
}

double scale_for(double norm, bool normalize, double floor, std::size_t row) {
  if (!normalize) return 1.0;
  if (norm == 0.0 && floor == 0.0)
    throw std::domain_error("byol_loss: row " + std::to_string(row) + " has zero norm");
  return 1.0 / std::max(norm, floor);
}

}  // namespace

nn::LossValue byol_loss_with_grad(const Tensor& p, const Tensor& t, bool normalize, double floor) {
  const auto [M, d] = rows_and_dim(p);
  if (t.shape() != p.shape() || M % 2 != 0 || M == 0)
    throw std::invalid_argument("byol_loss needs matching (2B, d) predictions and targets");
  const std::size_t B = M / 2;
  nn::LossValue out{0.0, Tensor(p.shape())};
  const double w = 1.0 / (static_cast<double>(B) * static_cast<double>(d));
  for (std::size_t i = 0; i < M; ++i) {
    const double* pi = p.data() + i * d;
    const double* ti = t.data() + ((i + B) % M) * d;
    const double pn = row_norm(pi, d);
    const double sp = scale_for(pn, normalize, floor, i);
    const double st = scale_for(row_norm(ti, d), normalize, floor, (i + B) % M);
    double* gi = out.grad.data() + i * d;
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = pi[j] * sp - ti[j] * st;
      out.value += diff * diff * w;
      gi[j] = 2.0 * diff * w;  // d/d(p-hat)
      dot += gi[j] * pi[j] * sp;
    }
    // Back through p-hat = p / |p| unless the norm was floored.
    if (normalize && pn >= floor) {
      for (std::size_t j = 0; j < d; ++j) gi[j] = (gi[j] - dot * pi[j] * sp) * sp;
    } else {
      for (std::size_t j = 0; j < d; ++j) gi[j] *= sp;
    }
  }
  return out;
}

double byol_loss(const Tensor& p_v, const Tensor& t_vp, const Tensor& p_vp, const Tensor& t_v, bool normalize) {
  if (p_v.shape() != t_vp.shape() || p_v.shape() != p_vp.shape() || p_v.shape() != t_v.shape())
    throw std::invalid_argument("byol_loss inputs must share one shape");
  const auto [B, d] = rows_and_dim(p_v);
  const Tensor flat_pv = p_v.reshaped({B, d}), flat_pvp = p_vp.reshaped({B, d});
  const Tensor flat_tv = t_v.reshaped({B, d}), flat_tvp = t_vp.reshaped({B, d});
  return byol_loss_with_grad(nn::concat_rows(flat_pv, flat_pvp), nn::concat_rows(flat_tv, flat_tvp), normalize)
      .value;
}

void ema_update(std::span<nn::Parameter* const> target, std::span<const nn::Parameter* const> online, double beta) {
  if (target.size() != online.size()) throw std::invalid_argument("ema_update: parameter lists differ in length");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("ema_update: beta must lie in [0, 1]");
  for (std::size_t k = 0; k < target.size(); ++k) {
    Tensor& xi = target[k]->value;
    const Tensor& theta = online[k]->value;
    if (xi.shape() != theta.shape()) throw std::invalid_argument("ema_update: parameter shapes differ");
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = beta * xi[i] + (1.0 - beta) * theta[i];
  }
}

}  // namespace wearssl::byol
