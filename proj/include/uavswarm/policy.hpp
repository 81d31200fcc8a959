#pragma once

// Actor/critic parameter store, per-UAV action distributions, exploration
// and the actor-critic gradient accumulation.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "uavswarm/env.hpp"
#include "uavswarm/mlp.hpp"

namespace uavswarm {

struct Transition;

/// Actor (theta), critic (theta_v) and the stale copies used to act and to
/// differentiate within an episode.
struct PolicyParams {
  Mlp actor;
  Mlp critic;
  Mlp actor_stale;
  Mlp critic_stale;

  /// theta' = theta, theta_v' = theta_v
  void refresh_stale();
  bool finite() const;
  int max_swarm() const { return actor.output_size() / kNumActions; }

  bool operator==(const PolicyParams&) const = default;
};

/// Actor: state -> hidden... -> 5 logits per UAV slot. Critic: state ->
/// hidden... -> one value per UAV slot. With a null rng every parameter is
/// zero.
PolicyParams make_policy(int state_dim, int max_swarm, const std::vector<int>& hidden,
                         std::mt19937_64* rng);

using ActionProbs = std::array<double, kNumActions>;

struct PolicyOutput {
  std::vector<ActionProbs> probs;  // one distribution per UAV slot
  std::vector<double> values;      // V_u(s), one per UAV slot
};

void softmax_slots(std::span<const double> logits, std::vector<ActionProbs>& probs);

PolicyOutput forward(const Mlp& actor, const Mlp& critic, const State& state);
/// Uses the current (non-stale) parameters.
PolicyOutput forward(const PolicyParams& params, const State& state);

enum class SelectMode { kArgmax, kSample };

/// Per active slot: with probability epsilon a uniform action, otherwise the
/// argmax (ties to the lowest index) or a sample. Inactive slots hover.
std::vector<int> select_action(std::span<const ActionProbs> dist, std::span<const std::uint8_t> active,
                               double epsilon, SelectMode mode, std::mt19937_64& rng);

struct GradAccumulator {
  std::vector<double> actor;   // d theta
  std::vector<double> critic;  // d theta_v

  GradAccumulator() = default;
  explicit GradAccumulator(const PolicyParams& params);
  void zero();
  bool finite() const;
};

/// Per transition, one entry per UAV slot.
using SlotMatrix = std::vector<std::vector<double>>;

/// Discounted team reward-to-go; the sum restarts after every done
/// transition.
std::vector<double> discounted_returns(std::span<const Transition> batch, double gamma);

/// The same recursion applied to each slot's reward share. Throws
/// std::invalid_argument when a transition lacks slot rewards.
SlotMatrix slot_discounted_returns(std::span<const Transition> batch, double gamma);

/// Adds sum_i sum_u A_iu * grad log pi_u(a_iu|s_i; theta') with
/// A_iu = R_iu - V_u(s_i; theta_v') held constant, over active slots, plus
/// entropy_coef times the gradient of the policy entropy. Returns the sum of
/// advantages.
double accumulate_actor_gradient(const PolicyParams& params, std::span<const Transition> batch,
                                 const SlotMatrix& returns, GradAccumulator& acc,
                                 double entropy_coef = 0.0);

/// Adds d/d theta_v' of sum_i sum_u (R_iu - V_u(s_i; theta_v'))^2 over
/// active slots. Returns that loss.
double accumulate_critic_gradient(const PolicyParams& params, std::span<const Transition> batch,
                                  const SlotMatrix& returns, GradAccumulator& acc);

/// Both terms with returns computed from the batch itself, treated as an
/// ordered trajectory.
void actor_critic_accumulate(const PolicyParams& params, std::span<const Transition> batch,
                             double gamma, GradAccumulator& acc);

/// theta += lr * d theta (ascent), theta_v -= lr * d theta_v (descent).
/// Throws std::domain_error on a non-finite accumulator or result.
void apply_update(PolicyParams& params, const GradAccumulator& acc, double learning_rate);

}  // namespace uavswarm
