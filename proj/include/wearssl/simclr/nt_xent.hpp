#pragma once

#include "wearssl/nn/network.hpp"

namespace wearssl::simclr {

/// Normalized-temperature cross-entropy over a (2N, d) batch in which rows i
/// and i + N are the two views of one sample. Every row is scored against
/// its partner among the other 2N - 1 rows; the result is the mean over all
/// 2N rows.
///
/// Norms below `norm_floor` are replaced by the floor. With the default
/// floor of 0 a zero-norm row throws std::domain_error.
double nt_xent(const nn::Tensor& z, double temperature, double norm_floor = 0.0);

/// Loss and its gradient with respect to z.
nn::LossValue nt_xent_with_grad(const nn::Tensor& z, double temperature, double norm_floor = 0.0);

}  // namespace wearssl::simclr
