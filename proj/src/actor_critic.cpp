#include "uavswarm/actor_critic.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavswarm {

OptimizerConfig AgentConfig::optimizer_config() const {
  OptimizerConfig c;
  c.kind = optimizer;
  c.learning_rate = learning_rate;
  c.max_grad_norm = max_grad_norm;
  return c;
}

void AgentConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("agent.hidden needs at least one layer");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("agent.hidden sizes must be >= 1");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent.gamma must lie in [0, 1]");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("agent.learning_rate must be > 0");
  if (replay_capacity < 1) throw std::invalid_argument("agent.replay_capacity must be >= 1");
  if (minibatch < 1) throw std::invalid_argument("agent.minibatch must be >= 1");
  if (dqn_target_interval < 1) throw std::invalid_argument("agent.dqn_target_interval must be >= 1");
  if (!(ppo_clip >= 0.0)) throw std::invalid_argument("agent.ppo_clip must be >= 0");
  if (ppo_epochs < 1) throw std::invalid_argument("agent.ppo_epochs must be >= 1");
  if (!(meta_outer_rate > 0.0)) throw std::invalid_argument("agent.meta_outer_rate must be > 0");
  if (meta_inner_steps < 1) throw std::invalid_argument("agent.meta_inner_steps must be >= 1");
  if (meta_tasks_per_iteration < 1) throw std::invalid_argument("agent.meta_tasks_per_iteration must be >= 1");
  if (meta_iterations < 0) throw std::invalid_argument("agent.meta_iterations must be >= 0");
  for (double e : {epsilon_start, epsilon_end}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("agent epsilon values must lie in [0, 1]");
  }
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw std::invalid_argument("agent.epsilon_decay_fraction must lie in (0, 1]");
  }
  if (!(entropy_coef >= 0.0) || !(entropy_coef_final >= 0.0)) {
    throw std::invalid_argument("agent entropy coefficients must be >= 0");
  }
}

double epsilon_schedule(const AgentConfig& config, int episode, int total_episodes) {
  const double horizon = std::max(1.0, config.epsilon_decay_fraction * total_episodes);
  const double frac = episode / horizon;
  if (frac >= 1.0) return config.epsilon_end;
  return config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start);
}

double entropy_schedule(const AgentConfig& config, double epsilon) {
  const double span = config.epsilon_start - config.epsilon_end;
  if (span == 0.0) return config.entropy_coef;
  const double frac = std::clamp((epsilon - config.epsilon_end) / span, 0.0, 1.0);
  return config.entropy_coef_final + frac * (config.entropy_coef - config.entropy_coef_final);
}

EpisodeStats RandomLearner::run_episode(Environment& env, double, std::mt19937_64& rng, bool) {
  EpisodeStats stats;
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  std::vector<int> actions(static_cast<std::size_t>(env.config().max_swarm));
  while (!env.done()) {
    for (auto& a : actions) a = pick(rng);
    const StepOutcome out = env.step(actions);
    stats.reward += out.reward;
    ++stats.steps;
  }
  return stats;
}

ActorCriticLearner::ActorCriticLearner(PolicyParams params, AgentConfig config)
    : params_(std::move(params)),
      config_(std::move(config)),
      memory_(static_cast<std::size_t>(config_.replay_capacity)),
      actor_opt_(config_.optimizer_config(), params_.actor.param_count()),
      critic_opt_(config_.optimizer_config(), params_.critic.param_count()) {}

void ActorCriticLearner::reset_params(PolicyParams params) {
  params_ = std::move(params);
  memory_ = ReplayMemory(static_cast<std::size_t>(config_.replay_capacity));
  actor_opt_ = Optimizer(config_.optimizer_config(), params_.actor.param_count());
  critic_opt_ = Optimizer(config_.optimizer_config(), params_.critic.param_count());
}

void ActorCriticLearner::apply(const GradAccumulator& acc) {
  if (config_.optimizer == OptimizerConfig::Kind::kSgd && config_.max_grad_norm <= 0.0) {
    apply_update(params_, acc, config_.learning_rate);
    return;
  }
  if (!acc.finite()) throw std::domain_error("non-finite gradient accumulator");
  actor_opt_.ascend(params_.actor.params(), acc.actor);
  critic_opt_.descend(params_.critic.params(), acc.critic);
  if (!params_.finite()) throw std::domain_error("update produced non-finite parameters");
}

EpisodeStats ActorCriticLearner::run_episode(Environment& env, double epsilon, std::mt19937_64& rng,
                                             bool train) {
  params_.refresh_stale();
  std::vector<Transition> episode;
  EpisodeStats stats;
  State state = env.encode_state();
  while (!env.done()) {
    const PolicyOutput out = forward(params_.actor_stale, params_.critic_stale, state);
    const std::vector<int> actions = select_action(out.probs, state.active, 0.0, SelectMode::kSample, rng);
    StepOutcome step = env.step(actions);
    stats.reward += step.reward;
    ++stats.steps;
    if (train) episode.push_back(make_transition(state, actions, step));
    state = std::move(step.next);
  }
  if (!train) return stats;

  GradAccumulator acc(params_);
  const SlotMatrix returns = slot_discounted_returns(episode, config_.gamma);
  accumulate_actor_gradient(params_, episode, returns, acc, entropy_schedule(config_, epsilon));
  accumulate_critic_gradient(params_, episode, returns, acc);
  // One replay minibatch per episode adds older returns to the critic fit.
  const auto minibatch = static_cast<std::size_t>(config_.minibatch);
  if (memory_.size() >= minibatch) {
    std::vector<Transition> replay_batch;
    SlotMatrix replay_returns;
    for (const Transition* t : memory_.sample_refs(minibatch, rng)) {
      replay_batch.push_back(*t);
      replay_returns.push_back(t->slot_returns);
    }
    accumulate_critic_gradient(params_, replay_batch, replay_returns, acc);
  }
  for (std::size_t i = 0; i < episode.size(); ++i) {
    episode[i].slot_returns = returns[i];
    memory_.store(std::move(episode[i]));
  }
  apply(acc);
  return stats;
}

}  // namespace uavswarm
