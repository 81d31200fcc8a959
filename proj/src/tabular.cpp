#include "uavswarm/tabular.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavswarm {

namespace {

std::vector<int> active_slots(const State& s) {
  std::vector<int> out;
  for (std::size_t u = 0; u < s.active.size(); ++u) {
    if (s.active[u]) out.push_back(static_cast<int>(u));
  }
  return out;
}

int joint_count(std::size_t active) {
  int n = 1;
  for (std::size_t i = 0; i < active; ++i) n *= kNumActions;
  return n;
}

// Joint index -> per-slot actions, first active slot most significant.
std::vector<int> decode(int code, const std::vector<int>& slots, std::size_t max_swarm) {
  std::vector<int> actions(max_swarm, static_cast<int>(Action::kHover));
  for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
    actions[static_cast<std::size_t>(*it)] = code % kNumActions;
    code /= kNumActions;
  }
  return actions;
}

}  // namespace

TabularQLearner::TabularQLearner(double learning_rate, double gamma, double initial_value)
    : learning_rate_(learning_rate), gamma_(gamma), initial_value_(initial_value) {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("tabular learning rate must lie in (0, 1]");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
}

std::vector<double> TabularQLearner::key(const State& state, int step) {
  std::vector<double> k = state.features;
  k.push_back(static_cast<double>(step));
  return k;
}

std::vector<double>& TabularQLearner::row(const State& state, int step) {
  auto [it, inserted] = table_.try_emplace(key(state, step));
  if (inserted) it->second.assign(static_cast<std::size_t>(joint_count(active_slots(state).size())), initial_value_);
  return it->second;
}

std::vector<double> TabularQLearner::values(const State& state, int step) const {
  const auto it = table_.find(key(state, step));
  if (it != table_.end()) return it->second;
  return std::vector<double>(static_cast<std::size_t>(joint_count(active_slots(state).size())), initial_value_);
}

EpisodeStats TabularQLearner::run_episode(Environment& env, double epsilon, std::mt19937_64& rng,
                                          bool train) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  const std::size_t max_swarm = static_cast<std::size_t>(env.config().max_swarm);
  if (joint_count(max_swarm) > 5 * 5 * 5) {
    throw std::invalid_argument("tabular Q-learning supports at most 3 UAV slots");
  }
  EpisodeStats stats;
  State state = env.encode_state();
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (!env.done()) {
    const std::vector<int> slots = active_slots(state);
    const std::vector<double> q = values(state, stats.steps);
    int code = 0;
    if (coin(rng) < epsilon) {
      code = std::uniform_int_distribution<int>(0, static_cast<int>(q.size()) - 1)(rng);
    } else {
      code = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
    }
    StepOutcome step = env.step(decode(code, slots, max_swarm));
    stats.reward += step.reward;
    const int now = stats.steps++;
    if (train) {
      double target = step.reward;
      if (!step.done) {
        const std::vector<double> next = values(step.next, stats.steps);
        target += gamma_ * *std::max_element(next.begin(), next.end());
      }
      double& cell = row(state, now)[static_cast<std::size_t>(code)];
      cell += learning_rate_ * (target - cell);
    }
    state = std::move(step.next);
  }
  return stats;
}

}  // namespace uavswarm
