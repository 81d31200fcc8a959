#pragma once

// First-order meta-learning over the task family: adapt a copy of the
// meta-parameters with actor-critic episodes on each sampled task, then
// interpolate the meta-parameters toward the mean adapted solution.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "uavswarm/agent.hpp"
#include "uavswarm/env.hpp"
#include "uavswarm/policy.hpp"

namespace uavswarm {

struct MetaState {
  PolicyParams meta;
  int inner_steps = 10;
  double inner_learning_rate = 1e-3;
  double outer_rate = 0.5;

  void validate() const;
};

/// Clones the meta-parameters and runs k_steps actor-critic episodes on the
/// task (episode i reset with seed + i). The meta-parameters are untouched.
PolicyParams meta_adapt(const MetaState& meta, const TaskSpec& task, Environment& env, int k_steps,
                        const AgentConfig& agent, std::uint64_t seed);

/// meta <- meta + outer_rate * mean_t(adapted_t - meta)
void meta_outer_update(MetaState& meta, std::span<const PolicyParams> adapted);

struct MetaTrainStats {
  int iterations = 0;
  int episodes = 0;
};

/// iterations x (sample tasks, adapt each, outer update).
MetaTrainStats meta_train(MetaState& meta, Environment& env, const AgentConfig& agent, int iterations,
                          std::mt19937_64& rng);

}  // namespace uavswarm
