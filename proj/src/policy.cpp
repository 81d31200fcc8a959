#include "uavswarm/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uavswarm/kernels.hpp"
#include "uavswarm/replay.hpp"

namespace uavswarm {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void PolicyParams::refresh_stale() {
  actor_stale = actor;
  critic_stale = critic;
}

bool PolicyParams::finite() const {
  return all_finite(actor.params()) && all_finite(critic.params()) &&
         all_finite(actor_stale.params()) && all_finite(critic_stale.params());
}

PolicyParams make_policy(int state_dim, int max_swarm, const std::vector<int>& hidden,
                         std::mt19937_64* rng) {
  std::vector<int> actor_sizes{state_dim};
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  std::vector<int> critic_sizes = actor_sizes;
  actor_sizes.push_back(max_swarm * kNumActions);
  critic_sizes.push_back(max_swarm);
  PolicyParams p{Mlp(actor_sizes), Mlp(critic_sizes), {}, {}};
  if (rng != nullptr) {
    // Small output weights keep the initial policy close to uniform.
    p.actor.init_random(*rng, 0.1);
    p.critic.init_random(*rng, 1.0);
  }
  p.refresh_stale();
  return p;
}

void softmax_slots(std::span<const double> logits, std::vector<ActionProbs>& probs) {
  const std::size_t slots = logits.size() / kNumActions;
  probs.resize(slots);
  for (std::size_t u = 0; u < slots; ++u) {
    const double* z = logits.data() + u * kNumActions;
    const double zmax = *std::max_element(z, z + kNumActions);
    double sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      probs[u][a] = std::exp(z[a] - zmax);
      sum += probs[u][a];
    }
    for (int a = 0; a < kNumActions; ++a) probs[u][a] /= sum;
  }
}

PolicyOutput forward(const Mlp& actor, const Mlp& critic, const State& state) {
  PolicyOutput out;
  const std::vector<double> logits = actor.forward(state.features);
  softmax_slots(logits, out.probs);
  out.values = critic.forward(state.features);
  return out;
}

PolicyOutput forward(const PolicyParams& params, const State& state) {
  return forward(params.actor, params.critic, state);
}

std::vector<int> select_action(std::span<const ActionProbs> dist, std::span<const std::uint8_t> active,
                               double epsilon, SelectMode mode, std::mt19937_64& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> uniform_action(0, kNumActions - 1);
  std::vector<int> actions(dist.size(), static_cast<int>(Action::kHover));
  for (std::size_t u = 0; u < dist.size(); ++u) {
    if (u >= active.size() || !active[u]) continue;
    if (epsilon > 0.0 && unit(rng) < epsilon) {
      actions[u] = uniform_action(rng);
      continue;
    }
    const auto& p = dist[u];
    if (mode == SelectMode::kArgmax) {
      actions[u] = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    } else {
      const double r = unit(rng);
      double cum = 0.0;
      int chosen = kNumActions - 1;
      for (int a = 0; a < kNumActions; ++a) {
        cum += p[a];
        if (r < cum) {
          chosen = a;
          break;
        }
      }
      actions[u] = chosen;
    }
  }
  return actions;
}

GradAccumulator::GradAccumulator(const PolicyParams& params)
    : actor(params.actor.param_count(), 0.0), critic(params.critic.param_count(), 0.0) {}

void GradAccumulator::zero() {
  std::fill(actor.begin(), actor.end(), 0.0);
  std::fill(critic.begin(), critic.end(), 0.0);
}

bool GradAccumulator::finite() const { return all_finite(actor) && all_finite(critic); }

std::vector<double> discounted_returns(std::span<const Transition> batch, double gamma) {
  std::vector<double> returns(batch.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = batch.size(); i-- > 0;) {
    if (batch[i].done) running = 0.0;
    running = batch[i].reward + gamma * running;
    returns[i] = running;
  }
  return returns;
}

SlotMatrix slot_discounted_returns(std::span<const Transition> batch, double gamma) {
  SlotMatrix returns(batch.size());
  std::vector<double> running;
  for (std::size_t i = batch.size(); i-- > 0;) {
    const auto& r = batch[i].slot_rewards;
    if (r.empty()) throw std::invalid_argument("transition carries no per-slot rewards");
    if (batch[i].done || running.size() != r.size()) running.assign(r.size(), 0.0);
    for (std::size_t u = 0; u < r.size(); ++u) running[u] = r[u] + gamma * running[u];
    returns[i] = running;
  }
  return returns;
}

namespace {

bool slot_active(const Transition& t, std::size_t u) { return u < t.state.active.size() && t.state.active[u]; }

void check_returns(std::span<const Transition> batch, const SlotMatrix& returns, std::size_t slots) {
  if (returns.size() != batch.size()) throw std::invalid_argument("one return row per transition required");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t u = 0; u < slots; ++u) {
      if (slot_active(batch[i], u) && u >= returns[i].size()) {
        throw std::invalid_argument("return row shorter than the active slots");
      }
    }
  }
}

}  // namespace

double accumulate_actor_gradient(const PolicyParams& params, std::span<const Transition> batch,
                                 const SlotMatrix& returns, GradAccumulator& acc, double entropy_coef) {
  if (acc.actor.size() != params.actor_stale.param_count() ||
      acc.critic.size() != params.critic_stale.param_count()) {
    throw std::invalid_argument("accumulator shape does not match parameters");
  }
  const auto slots = static_cast<std::size_t>(params.actor_stale.output_size() / kNumActions);
  check_returns(batch, returns, slots);
  Mlp::Tape tape;
  std::vector<ActionProbs> probs;
  std::vector<double> grad_logits(static_cast<std::size_t>(params.actor_stale.output_size()));
  double advantage_sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    const std::vector<double> values = params.critic_stale.forward(t.state.features);
    params.actor_stale.forward(t.state.features, tape);
    softmax_slots(tape.acts.back(), probs);
    std::fill(grad_logits.begin(), grad_logits.end(), 0.0);
    bool any = false;
    for (std::size_t u = 0; u < probs.size(); ++u) {
      if (!slot_active(t, u)) continue;
      const double advantage = returns[i][u] - values[u];
      advantage_sum += advantage;
      const int a = t.actions[u];
      double entropy = 0.0;
      if (entropy_coef != 0.0) {
        for (int k = 0; k < kNumActions; ++k) {
          if (probs[u][k] > 0.0) entropy -= probs[u][k] * std::log(probs[u][k]);
        }
      }
      for (int k = 0; k < kNumActions; ++k) {
        double g = advantage * ((k == a ? 1.0 : 0.0) - probs[u][k]);
        if (entropy_coef != 0.0 && probs[u][k] > 0.0) {
          g -= entropy_coef * probs[u][k] * (std::log(probs[u][k]) + entropy);
        }
        grad_logits[u * kNumActions + static_cast<std::size_t>(k)] = g;
      }
      any = true;
    }
    if (any) params.actor_stale.backward(tape, grad_logits, acc.actor);
  }
  return advantage_sum;
}

double accumulate_critic_gradient(const PolicyParams& params, std::span<const Transition> batch,
                                  const SlotMatrix& returns, GradAccumulator& acc) {
  if (acc.critic.size() != params.critic_stale.param_count()) {
    throw std::invalid_argument("accumulator shape does not match parameters");
  }
  const auto slots = static_cast<std::size_t>(params.critic_stale.output_size());
  check_returns(batch, returns, slots);
  Mlp::Tape tape;
  std::vector<double> grad_out(slots);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    params.critic_stale.forward(batch[i].state.features, tape);
    const auto& v = tape.acts.back();
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    bool any = false;
    for (std::size_t u = 0; u < slots; ++u) {
      if (!slot_active(batch[i], u)) continue;
      const double err = returns[i][u] - v[u];
      loss += err * err;
      grad_out[u] = -2.0 * err;
      any = true;
    }
    if (any) params.critic_stale.backward(tape, grad_out, acc.critic);
  }
  return loss;
}

void actor_critic_accumulate(const PolicyParams& params, std::span<const Transition> batch,
                             double gamma, GradAccumulator& acc) {
  if (batch.empty()) throw std::invalid_argument("actor-critic batch must be non-empty");
  const SlotMatrix returns = slot_discounted_returns(batch, gamma);
  accumulate_actor_gradient(params, batch, returns, acc);
  accumulate_critic_gradient(params, batch, returns, acc);
}

void apply_update(PolicyParams& params, const GradAccumulator& acc, double learning_rate) {
  if (!acc.finite()) throw std::domain_error("non-finite gradient accumulator");
  if (acc.actor.size() != params.actor.param_count() || acc.critic.size() != params.critic.param_count()) {
    throw std::invalid_argument("accumulator shape does not match parameters");
  }
  kernels::axpy(learning_rate, acc.actor, params.actor.params());
  kernels::axpy(-learning_rate, acc.critic, params.critic.params());
  if (!params.finite()) throw std::domain_error("update produced non-finite parameters");
}

}  // namespace uavswarm
