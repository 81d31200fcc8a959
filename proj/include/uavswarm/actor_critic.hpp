#pragma once

#include <memory>

#include "uavswarm/agent.hpp"
#include "uavswarm/optimizer.hpp"
#include "uavswarm/policy.hpp"
#include "uavswarm/replay.hpp"

namespace uavswarm {

/// Episode-level actor-critic with one value head per UAV slot. Acts by
/// sampling the stale policy, then fits the actor on the
/// finished episode and the critic on the episode plus one replay minibatch,
/// applying both once per episode. Epsilon only sets the entropy weight.
class ActorCriticLearner final : public Learner {
 public:
  ActorCriticLearner(PolicyParams params, AgentConfig config);

  EpisodeStats run_episode(Environment& env, double epsilon, std::mt19937_64& rng, bool train) override;
  std::string name() const override { return "actor_critic"; }

  const PolicyParams& params() const { return params_; }
  PolicyParams& params() { return params_; }
  const ReplayMemory& memory() const { return memory_; }
  /// Replaces the parameters and clears optimizer state and replay memory.
  void reset_params(PolicyParams params);

 private:
  void apply(const GradAccumulator& acc);

  PolicyParams params_;
  AgentConfig config_;
  ReplayMemory memory_;
  Optimizer actor_opt_;
  Optimizer critic_opt_;
};

}  // namespace uavswarm
