#pragma once

#include <span>

#include "uavswarm/agent.hpp"
#include "uavswarm/optimizer.hpp"
#include "uavswarm/policy.hpp"
#include "uavswarm/replay.hpp"

namespace uavswarm {

/// Clipped surrogate sum_i sum_u min(r A_iu, clip(r, 1-eps, 1+eps) A_iu) with
/// r = pi(a_u|s_i) / exp(behavior_logp_u), one ratio per active UAV slot.
/// The gradient flows through r only where 1-eps < r < 1+eps or where the
/// unclipped term is strictly the smaller one. Adds d/dtheta into grad and
/// returns the surrogate.
double ppo_surrogate_and_gradient(const Mlp& actor, std::span<const Transition> rollout,
                                  const SlotMatrix& advantages, double clip_eps,
                                  std::span<double> grad);

/// Records log pi(a_u|s) under the given actor into each transition.
void record_behavior_logp(const Mlp& actor, std::span<Transition> rollout);

/// epochs x (surrogate ascent on the actor, squared-error descent on the
/// critic) over a rollout collected under params' stale copy, with
/// per-slot advantage = slot reward-to-go - V_stale,u(s).
void ppo_update(PolicyParams& params, std::span<Transition> rollout, double clip_eps, int epochs,
                double gamma, Optimizer& actor_opt, Optimizer& critic_opt);

class PpoLearner final : public Learner {
 public:
  PpoLearner(PolicyParams params, AgentConfig config);

  /// Samples from the current policy; epsilon is ignored so that the
  /// recorded behaviour log-probabilities match the acting policy.
  EpisodeStats run_episode(Environment& env, double epsilon, std::mt19937_64& rng, bool train) override;
  std::string name() const override { return "ppo"; }

  const PolicyParams& params() const { return params_; }

 private:
  PolicyParams params_;
  AgentConfig config_;
  Optimizer actor_opt_;
  Optimizer critic_opt_;
};

}  // namespace uavswarm
