#pragma once

#include <span>

#include "wearssl/nn/network.hpp"

namespace wearssl::byol {

/// Symmetric regression loss between online predictions and target
/// projections. Inputs are (batch, d) or (d) tensors:
///   mean over batch of [ mse(p_v, t_vp) + mse(p_vp, t_v) ]
/// where mse averages over the d coordinates. With `normalize` every vector
/// is first scaled to unit length, so each term lies in [0, 4/d].
/// A zero-norm vector throws std::domain_error when normalizing.
double byol_loss(const nn::Tensor& p_v, const nn::Tensor& t_vp, const nn::Tensor& p_vp, const nn::Tensor& t_v,
                 bool normalize = true);

/// The same loss for stacked (2B, d) batches whose rows [0, B) come from
/// view v and rows [B, 2B) from view v'. Row i of `predictions` is matched
/// with row (i + B) mod 2B of `targets`. The gradient is taken with respect
/// to the predictions only. Norms below `norm_floor` are floored.
nn::LossValue byol_loss_with_grad(const nn::Tensor& predictions, const nn::Tensor& targets, bool normalize = true,
                                  double norm_floor = 0.0);

/// xi <- beta * xi + (1 - beta) * theta, parameter values only.
void ema_update(std::span<nn::Parameter* const> target, std::span<const nn::Parameter* const> online, double beta);

}  // namespace wearssl::byol
