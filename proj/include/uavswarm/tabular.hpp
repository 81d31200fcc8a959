#pragma once

#include <map>
#include <vector>

#include "uavswarm/agent.hpp"

namespace uavswarm {

/// One-step Q-learning over joint actions of the active UAVs. The table key
/// is the encoded state plus the step index within the episode, since the
/// encoding carries no clock. Only practical on small grids. Unseen
/// entries start at `initial_value`; an optimistic value drives exploration.
class TabularQLearner final : public Learner {
 public:
  TabularQLearner(double learning_rate, double gamma, double initial_value = 0.0);

  EpisodeStats run_episode(Environment& env, double epsilon, std::mt19937_64& rng, bool train) override;
  std::string name() const override { return "tabular_q"; }

  std::size_t table_size() const { return table_.size(); }
  /// Q values of every joint action in `state` at episode step `step`.
  std::vector<double> values(const State& state, int step) const;

 private:
  static std::vector<double> key(const State& state, int step);
  std::vector<double>& row(const State& state, int step);

  double learning_rate_;
  double gamma_;
  double initial_value_;
  std::map<std::vector<double>, std::vector<double>> table_;
};

}  // namespace uavswarm
