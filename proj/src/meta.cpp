#include "uavswarm/meta.hpp"

#include <stdexcept>

#include "uavswarm/actor_critic.hpp"

namespace uavswarm {

void MetaState::validate() const {
  if (inner_steps < 1) throw std::invalid_argument("meta inner steps must be >= 1");
  if (!(inner_learning_rate > 0.0) || !(outer_rate > 0.0)) {
    throw std::invalid_argument("meta learning rates must be > 0");
  }
}

PolicyParams meta_adapt(const MetaState& meta, const TaskSpec& task, Environment& env, int k_steps,
                        const AgentConfig& agent, std::uint64_t seed) {
  if (k_steps < 1) throw std::invalid_argument("meta adaptation needs k_steps >= 1");
  AgentConfig inner = agent;
  inner.learning_rate = meta.inner_learning_rate;
  ActorCriticLearner learner(meta.meta, inner);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < k_steps; ++i) {
    env.reset(task, seed + static_cast<std::uint64_t>(i));
    learner.run_episode(env, agent.epsilon_start, rng, true);
  }
  PolicyParams adapted = learner.params();
  adapted.refresh_stale();
  return adapted;
}

void meta_outer_update(MetaState& meta, std::span<const PolicyParams> adapted) {
  if (adapted.empty()) throw std::invalid_argument("meta update needs at least one adapted task");
  for (const auto& a : adapted) {
    if (!a.actor.same_shape(meta.meta.actor) || !a.critic.same_shape(meta.meta.critic)) {
      throw std::invalid_argument("adapted parameters differ in shape from the meta-parameters");
    }
  }
  const double scale = meta.outer_rate / static_cast<double>(adapted.size());
  auto blend = [&](std::span<double> target, auto member) {
    std::vector<double> delta(target.size(), 0.0);
    for (const auto& a : adapted) {
      const auto src = (a.*member).params();
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] += src[i] - target[i];
    }
    for (std::size_t i = 0; i < delta.size(); ++i) target[i] += scale * delta[i];
  };
  blend(meta.meta.actor.params(), &PolicyParams::actor);
  blend(meta.meta.critic.params(), &PolicyParams::critic);
  meta.meta.refresh_stale();
}

MetaTrainStats meta_train(MetaState& meta, Environment& env, const AgentConfig& agent, int iterations,
                          std::mt19937_64& rng) {
  meta.validate();
  MetaTrainStats stats;
  std::vector<PolicyParams> adapted;
  for (int it = 0; it < iterations; ++it) {
    adapted.clear();
    for (int t = 0; t < agent.meta_tasks_per_iteration; ++t) {
      const TaskSpec task = sample_task(rng, env.config());
      adapted.push_back(meta_adapt(meta, task, env, meta.inner_steps, agent, rng()));
      stats.episodes += meta.inner_steps;
    }
    meta_outer_update(meta, adapted);
    ++stats.iterations;
  }
  return stats;
}

}  // namespace uavswarm
