#pragma once

// Shared learner configuration and the episode-driving interface that the
// experiment harness uses for every algorithm.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uavswarm/env.hpp"
#include "uavswarm/optimizer.hpp"
#include "uavswarm/policy.hpp"

namespace uavswarm {

struct AgentConfig {
  std::vector<int> hidden{64, 64};
  double gamma = 0.85;
  double learning_rate = 1e-3;
  OptimizerConfig::Kind optimizer = OptimizerConfig::Kind::kAdam;
  double max_grad_norm = 0.0;
  double entropy_coef = 0.03;
  int replay_capacity = 10000;
  int minibatch = 64;
  int dqn_target_interval = 100;
  double ppo_clip = 0.2;
  int ppo_epochs = 4;
  double meta_outer_rate = 0.5;
  int meta_inner_steps = 10;
  int meta_tasks_per_iteration = 3;
  int meta_iterations = 3000;
  double epsilon_start = 0.9;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;
  // Entropy weight reached once epsilon has decayed to epsilon_end.
  double entropy_coef_final = 0.03;

  OptimizerConfig optimizer_config() const;
  void validate() const;
};

/// Linear decay from epsilon_start to epsilon_end over the first
/// epsilon_decay_fraction of the episodes, constant afterwards.
double epsilon_schedule(const AgentConfig& config, int episode, int total_episodes);

/// Entropy weight for policy-gradient learners, interpolated between
/// entropy_coef and entropy_coef_final by the position of `epsilon` on the
/// exploration schedule.
double entropy_schedule(const AgentConfig& config, double epsilon);

struct EpisodeStats {
  double reward = 0.0;
  int steps = 0;
};

class Learner {
 public:
  virtual ~Learner() = default;
  /// Plays the episode the environment was last reset into, learning from
  /// it when `train` is set.
  virtual EpisodeStats run_episode(Environment& env, double epsilon, std::mt19937_64& rng,
                                   bool train) = 0;
  virtual std::string name() const = 0;
};

class RandomLearner final : public Learner {
 public:
  EpisodeStats run_episode(Environment& env, double epsilon, std::mt19937_64& rng, bool train) override;
  std::string name() const override { return "random"; }
};

}  // namespace uavswarm
