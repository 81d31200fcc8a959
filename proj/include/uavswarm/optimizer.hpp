#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace uavswarm {

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Rescale gradients whose L2 norm exceeds this; 0 disables clipping.
  double max_grad_norm = 0.0;
};

OptimizerConfig::Kind optimizer_kind_from_string(const std::string& name);
std::string to_string(OptimizerConfig::Kind kind);

/// Per-parameter-vector optimizer state.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig config, std::size_t size);

  /// params -= step(grad)
  void descend(std::span<double> params, std::span<const double> grad);
  /// params += step(grad)
  void ascend(std::span<double> params, std::span<const double> grad);

  const OptimizerConfig& config() const { return config_; }
  long steps() const { return steps_; }

 private:
  void apply(std::span<double> params, std::span<const double> grad, double sign);

  OptimizerConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::vector<double> scratch_;
  long steps_ = 0;
};

}  // namespace uavswarm
