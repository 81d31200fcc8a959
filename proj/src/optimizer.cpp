#include "uavswarm/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "uavswarm/kernels.hpp"

namespace uavswarm {

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerConfig::Kind::kSgd;
  if (name == "adam") return OptimizerConfig::Kind::kAdam;
  throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(OptimizerConfig::Kind kind) {
  return kind == OptimizerConfig::Kind::kSgd ? "sgd" : "adam";
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t size) : config_(config) {
  if (!(config_.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (config_.kind == OptimizerConfig::Kind::kAdam) {
    m_.assign(size, 0.0);
    v_.assign(size, 0.0);
  }
}

void Optimizer::descend(std::span<double> params, std::span<const double> grad) { apply(params, grad, -1.0); }

void Optimizer::ascend(std::span<double> params, std::span<const double> grad) { apply(params, grad, 1.0); }

void Optimizer::apply(std::span<double> params, std::span<const double> grad, double sign) {
  if (params.size() != grad.size()) throw std::invalid_argument("gradient size mismatch");
  double clip = 1.0;
  if (config_.max_grad_norm > 0.0) {
    const double norm = std::sqrt(kernels::dot(grad, grad));
    if (norm > config_.max_grad_norm) clip = config_.max_grad_norm / norm;
  }
  ++steps_;
  if (config_.kind == OptimizerConfig::Kind::kSgd) {
    kernels::axpy(sign * config_.learning_rate * clip, grad, params);
    return;
  }
  if (m_.size() != params.size()) throw std::invalid_argument("optimizer state size mismatch");
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double step = sign * config_.learning_rate * std::sqrt(c2) / c1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i] * clip;
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    params[i] += step * m_[i] / (std::sqrt(v_[i]) + config_.epsilon);
  }
}

}  // namespace uavswarm
