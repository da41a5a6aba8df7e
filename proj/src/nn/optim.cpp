#include "wearssl/nn/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wearssl::nn {

double cosine_lr(std::int64_t step, std::int64_t total_steps, double base_lr) {
  if (total_steps < 1) throw std::invalid_argument("cosine_lr: total_steps must be >= 1");
  if (step < 0) throw std::invalid_argument("cosine_lr: step must be >= 0");
  if (step >= total_steps) return 0.0;
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

namespace {

void ensure_slots(std::vector<Tensor>& slots, std::span<Parameter* const> params) {
  if (slots.empty()) {
    slots.reserve(params.size());
    for (const Parameter* p : params) slots.emplace_back(p->value.shape());
    return;
  }
  if (slots.size() != params.size())
    throw std::invalid_argument("optimizer state holds " + std::to_string(slots.size()) +
                                " tensors but received " + std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (slots[i].shape() != params[i]->value.shape())
      throw std::invalid_argument("optimizer state shape mismatch at parameter " + std::to_string(i));
}

void check_lr(double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("learning rate must be finite and >= 0");
}

}  // namespace

double lars_trust_ratio(double weight_norm, double grad_norm, const LarsConfig& config) {
  if (weight_norm == 0.0) return 1.0;
  return config.trust_coefficient * weight_norm /
         (grad_norm + config.weight_decay * weight_norm + config.eps);
}

void Lars::step(std::span<Parameter* const> params, double lr) {
  check_lr(lr);
  ensure_slots(state_.first, params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Tensor& velocity = state_.first[i];
    if (p.role == ParamRole::kWeight) {
      const double ratio = lars_trust_ratio(p.value.l2_norm(), p.grad.l2_norm(), config_);
      const double local_lr = lr * ratio;
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        const double g = p.grad[j] + config_.weight_decay * p.value[j];
        velocity[j] = config_.momentum * velocity[j] + local_lr * g;
        p.value[j] -= velocity[j];
      }
    } else {
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        velocity[j] = config_.momentum * velocity[j] + lr * p.grad[j];
        p.value[j] -= velocity[j];
      }
    }
  }
  ++state_.step;
}

void Adam::step(std::span<Parameter* const> params, double lr) {
  check_lr(lr);
  ensure_slots(state_.first, params);
  ensure_slots(state_.second, params);
  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Tensor& m = state_.first[i];
    Tensor& v = state_.second[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p.value[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

}  // namespace wearssl::nn
