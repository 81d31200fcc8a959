#pragma once

#include <span>

#include "uavswarm/agent.hpp"
#include "uavswarm/mlp.hpp"
#include "uavswarm/optimizer.hpp"
#include "uavswarm/replay.hpp"

namespace uavswarm {

/// Squared TD error summed over transitions and active UAV slots, with
/// targets r + gamma * max_a Q_target(s', a) held fixed (zero bootstrap on
/// done). Adds dL/dtheta into grad and returns L.
double dqn_loss_and_gradient(const Mlp& q, const Mlp& target, std::span<const Transition> batch,
                             double gamma, std::span<double> grad);

/// One plain semi-gradient step theta -= lr * dL/dtheta.
double dqn_update(Mlp& q, const Mlp& target, std::span<const Transition> batch, double gamma,
                  double learning_rate);

/// Per-slot Q heads on one network: Q_u(s, a) estimates the team return when
/// UAV u takes a.
class DqnLearner final : public Learner {
 public:
  DqnLearner(Mlp q, AgentConfig config);

  EpisodeStats run_episode(Environment& env, double epsilon, std::mt19937_64& rng, bool train) override;
  std::string name() const override { return "dqn"; }

  const Mlp& q() const { return q_; }
  const Mlp& target() const { return target_; }
  long updates() const { return updates_; }

 private:
  Mlp q_;
  Mlp target_;
  AgentConfig config_;
  ReplayMemory memory_;
  Optimizer opt_;
  long updates_ = 0;
};

}  // namespace uavswarm
