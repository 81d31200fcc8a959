#include "uavswarm/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavswarm {

double ppo_surrogate_and_gradient(const Mlp& actor, std::span<const Transition> rollout,
                                  const SlotMatrix& advantages, double clip_eps,
                                  std::span<double> grad) {
  if (rollout.empty()) throw std::invalid_argument("PPO rollout must be non-empty");
  if (advantages.size() != rollout.size()) throw std::invalid_argument("one advantage per transition required");
  if (grad.size() != actor.param_count()) throw std::invalid_argument("gradient buffer size mismatch");
  Mlp::Tape tape;
  std::vector<ActionProbs> probs;
  std::vector<double> grad_logits(static_cast<std::size_t>(actor.output_size()));
  double surrogate = 0.0;
  for (std::size_t i = 0; i < rollout.size(); ++i) {
    const Transition& t = rollout[i];
    actor.forward(t.state.features, tape);
    softmax_slots(tape.acts.back(), probs);
    std::fill(grad_logits.begin(), grad_logits.end(), 0.0);
    bool any = false;
    for (std::size_t u = 0; u < probs.size(); ++u) {
      if (u >= t.state.active.size() || !t.state.active[u]) continue;
      if (u >= t.behavior_logp.size()) throw std::invalid_argument("missing behaviour log-probabilities");
      if (u >= advantages[i].size()) throw std::invalid_argument("missing advantage for an active slot");
      const double adv = advantages[i][u];
      const int a = t.actions[u];
      // Log-space ratio: exactly 1 when the policy has not moved.
      const double ratio = std::exp(std::log(probs[u][static_cast<std::size_t>(a)]) - t.behavior_logp[u]);
      const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
      const double unclipped_term = ratio * adv;
      const double clipped_term = clipped * adv;
      surrogate += std::min(unclipped_term, clipped_term);
      const bool inside = ratio > 1.0 - clip_eps && ratio < 1.0 + clip_eps;
      if (!(inside || unclipped_term < clipped_term)) continue;
      // d ratio / d z_k = ratio * (1[k == a] - p_k)
      for (int k = 0; k < kNumActions; ++k) {
        grad_logits[u * kNumActions + static_cast<std::size_t>(k)] =
            adv * ratio * ((k == a ? 1.0 : 0.0) - probs[u][static_cast<std::size_t>(k)]);
      }
      any = true;
    }
    if (any) actor.backward(tape, grad_logits, grad);
  }
  return surrogate;
}

void record_behavior_logp(const Mlp& actor, std::span<Transition> rollout) {
  std::vector<ActionProbs> probs;
  for (Transition& t : rollout) {
    softmax_slots(actor.forward(t.state.features), probs);
    t.behavior_logp.assign(probs.size(), 0.0);
    for (std::size_t u = 0; u < probs.size(); ++u) {
      t.behavior_logp[u] = std::log(probs[u][static_cast<std::size_t>(t.actions[u])]);
    }
  }
}

void ppo_update(PolicyParams& params, std::span<Transition> rollout, double clip_eps, int epochs,
                double gamma, Optimizer& actor_opt, Optimizer& critic_opt) {
  if (rollout.empty()) throw std::invalid_argument("PPO rollout must be non-empty");
  const SlotMatrix returns = slot_discounted_returns(rollout, gamma);
  SlotMatrix advantages(rollout.size());
  for (std::size_t i = 0; i < rollout.size(); ++i) {
    const std::vector<double> v = params.critic_stale.forward(rollout[i].state.features);
    advantages[i].resize(returns[i].size());
    for (std::size_t u = 0; u < returns[i].size() && u < v.size(); ++u) advantages[i][u] = returns[i][u] - v[u];
  }
  if (std::any_of(rollout.begin(), rollout.end(), [](const Transition& t) { return t.behavior_logp.empty(); })) {
    record_behavior_logp(params.actor_stale, rollout);
  }
  std::vector<double> actor_grad(params.actor.param_count());
  GradAccumulator critic_acc(params);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(actor_grad.begin(), actor_grad.end(), 0.0);
    ppo_surrogate_and_gradient(params.actor, rollout, advantages, clip_eps, actor_grad);
    actor_opt.ascend(params.actor.params(), actor_grad);

    // Critic fit uses the live critic; accumulate_critic_gradient reads the
    // stale slot, so point it at the current weights for this pass.
    critic_acc.zero();
    params.critic_stale = params.critic;
    accumulate_critic_gradient(params, rollout, returns, critic_acc);
    critic_opt.descend(params.critic.params(), critic_acc.critic);
  }
  params.refresh_stale();
}

PpoLearner::PpoLearner(PolicyParams params, AgentConfig config)
    : params_(std::move(params)),
      config_(std::move(config)),
      actor_opt_(config_.optimizer_config(), params_.actor.param_count()),
      critic_opt_(config_.optimizer_config(), params_.critic.param_count()) {}

EpisodeStats PpoLearner::run_episode(Environment& env, double, std::mt19937_64& rng, bool train) {
  params_.refresh_stale();
  EpisodeStats stats;
  std::vector<Transition> rollout;
  State state = env.encode_state();
  while (!env.done()) {
    const PolicyOutput out = forward(params_.actor_stale, params_.critic_stale, state);
    const std::vector<int> actions = select_action(out.probs, state.active, 0.0, SelectMode::kSample, rng);
    StepOutcome step = env.step(actions);
    stats.reward += step.reward;
    ++stats.steps;
    if (train) {
      Transition t = make_transition(state, actions, step);
      t.behavior_logp.resize(out.probs.size());
      for (std::size_t u = 0; u < out.probs.size(); ++u) {
        t.behavior_logp[u] = std::log(out.probs[u][static_cast<std::size_t>(actions[u])]);
      }
      rollout.push_back(std::move(t));
    }
    state = std::move(step.next);
  }
  if (train && !rollout.empty()) {
    ppo_update(params_, rollout, config_.ppo_clip, config_.ppo_epochs, config_.gamma, actor_opt_, critic_opt_);
  }
  return stats;
}

}  // namespace uavswarm
