#include "wearssl/simclr/nt_xent.hpp"

#include <cmath>
#include <stdexcept>

#include "wearssl/nn/eigen_view.hpp"

namespace wearssl::simclr {

nn::LossValue nt_xent_with_grad(const nn::Tensor& z, double tau, double norm_floor) {
  if (z.rank() != 2 || z.dim(0) < 4 || z.dim(0) % 2 != 0)
    throw std::invalid_argument("nt_xent expects a (2N, d) batch with N >= 2, got " + nn::to_string(z.shape()));
  if (!(tau > 0.0)) throw std::invalid_argument("nt_xent temperature must be > 0");
  const std::size_t M = z.dim(0), N = M / 2, d = z.dim(1);
  const auto Z = nn::const_matrix(z.data(), M, d);

  Eigen::VectorXd norm(M);
  std::vector<bool> floored(M, false);
  for (std::size_t i = 0; i < M; ++i) {
    const double n = Z.row(static_cast<Eigen::Index>(i)).norm();
    if (n == 0.0 && norm_floor == 0.0)
      throw std::domain_error("nt_xent: projection row " + std::to_string(i) + " has zero norm");
    floored[i] = n < norm_floor;
    norm[static_cast<Eigen::Index>(i)] = floored[i] ? norm_floor : n;
  }
  const nn::RowMatrix U = norm.cwiseInverse().asDiagonal() * Z;
  const nn::RowMatrix S = (U * U.transpose()) / tau;

  nn::RowMatrix G = nn::RowMatrix::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  double loss = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto partner = static_cast<Eigen::Index>((i + N) % M);
    double mx = -INFINITY;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(M); ++k)
      if (k != r) mx = std::max(mx, S(r, k));
    double sum = 0.0;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(M); ++k)
      if (k != r) sum += std::exp(S(r, k) - mx);
    const double lse = mx + std::log(sum);
    loss += lse - S(r, partner);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(M); ++k)
      if (k != r) G(r, k) = std::exp(S(r, k) - lse);
    G(r, partner) -= 1.0;
  }
  loss /= static_cast<double>(M);
  G /= static_cast<double>(M);

  const nn::RowMatrix dU = (G + G.transpose()) * U / tau;
  nn::LossValue out{loss, nn::Tensor(z.shape())};
  auto dZ = nn::matrix(out.grad.data(), M, d);
  for (std::size_t i = 0; i < M; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (floored[i]) {
      dZ.row(r) = dU.row(r) / norm[r];
    } else {
      const double proj = U.row(r).dot(dU.row(r));
      dZ.row(r) = (dU.row(r) - proj * U.row(r)) / norm[r];
    }
  }
  return out;
}

double nt_xent(const nn::Tensor& z, double tau, double norm_floor) {
  return nt_xent_with_grad(z, tau, norm_floor).value;
}

}  // namespace wearssl::simclr
