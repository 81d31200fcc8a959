#include "uavswarm/dqn.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavswarm {

double dqn_loss_and_gradient(const Mlp& q, const Mlp& target, std::span<const Transition> batch,
                             double gamma, std::span<double> grad) {
  if (batch.empty()) throw std::invalid_argument("DQN batch must be non-empty");
  if (!q.same_shape(target)) throw std::invalid_argument("Q and target networks differ in shape");
  if (grad.size() != q.param_count()) throw std::invalid_argument("gradient buffer size mismatch");
  Mlp::Tape tape;
  std::vector<double> grad_out(static_cast<std::size_t>(q.output_size()));
  double loss = 0.0;
  for (const Transition& t : batch) {
    std::vector<double> next_q;
    if (!t.done && gamma != 0.0) next_q = target.forward(t.next.features);
    q.forward(t.state.features, tape);
    const auto& qs = tape.acts.back();
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    const std::size_t slots = qs.size() / kNumActions;
    for (std::size_t u = 0; u < slots; ++u) {
      if (u >= t.state.active.size() || !t.state.active[u]) continue;
      double y = u < t.slot_rewards.size() ? t.slot_rewards[u] : t.reward;
      if (!next_q.empty()) {
        const auto first = next_q.begin() + static_cast<std::ptrdiff_t>(u * kNumActions);
        y += gamma * *std::max_element(first, first + kNumActions);
      }
      const std::size_t idx = u * kNumActions + static_cast<std::size_t>(t.actions[u]);
      const double err = y - qs[idx];
      loss += err * err;
      grad_out[idx] = -2.0 * err;
    }
    q.backward(tape, grad_out, grad);
  }
  return loss;
}

double dqn_update(Mlp& q, const Mlp& target, std::span<const Transition> batch, double gamma,
                  double learning_rate) {
  std::vector<double> grad(q.param_count(), 0.0);
  const double loss = dqn_loss_and_gradient(q, target, batch, gamma, grad);
  auto p = q.params();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= learning_rate * grad[i];
  return loss;
}

DqnLearner::DqnLearner(Mlp q, AgentConfig config)
    : q_(std::move(q)),
      target_(q_),
      config_(std::move(config)),
      memory_(static_cast<std::size_t>(config_.replay_capacity)),
      opt_(config_.optimizer_config(), q_.param_count()) {}

EpisodeStats DqnLearner::run_episode(Environment& env, double epsilon, std::mt19937_64& rng, bool train) {
  EpisodeStats stats;
  State state = env.encode_state();
  const auto minibatch = static_cast<std::size_t>(config_.minibatch);
  std::vector<double> grad(q_.param_count());
  std::vector<Transition> batch;
  std::vector<ActionProbs> greedy;
  while (!env.done()) {
    // select_action's argmax mode is reused on the raw Q values.
    const std::vector<double> qs = q_.forward(state.features);
    greedy.assign(qs.size() / kNumActions, ActionProbs{});
    for (std::size_t u = 0; u < greedy.size(); ++u) {
      std::copy_n(qs.begin() + static_cast<std::ptrdiff_t>(u * kNumActions), kNumActions, greedy[u].begin());
    }
    const std::vector<int> actions = select_action(greedy, state.active, epsilon, SelectMode::kArgmax, rng);
    StepOutcome step = env.step(actions);
    stats.reward += step.reward;
    ++stats.steps;
    if (train) {
      memory_.store(make_transition(state, actions, step));
      if (memory_.size() >= minibatch) {
        batch.clear();
        for (const Transition* t : memory_.sample_refs(minibatch, rng)) batch.push_back(*t);
        std::fill(grad.begin(), grad.end(), 0.0);
        dqn_loss_and_gradient(q_, target_, batch, config_.gamma, grad);
        // Mean over the minibatch keeps the step size independent of its size.
        for (auto& g : grad) g /= static_cast<double>(batch.size());
        opt_.descend(q_.params(), grad);
        if (++updates_ % config_.dqn_target_interval == 0) target_ = q_;
      }
    }
    state = std::move(step.next);
  }
  return stats;
}

}  // namespace uavswarm
