#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <vector>

#include "uavswarm/env.hpp"

namespace uavswarm {

struct Transition {
  State state;
  std::vector<int> actions;  // one per UAV slot
  double reward = 0.0;  // team reward
  State next;
  bool done = false;
  // Each UAV slot's share of the reward; sums to `reward`.
  std::vector<double> slot_rewards;
  // Per-slot discounted reward-to-go, filled once the episode has finished.
  std::vector<double> slot_returns;
  // log pi_old(a_u | s) per slot, recorded for clipped-ratio updates.
  std::vector<double> behavior_logp;
};

/// Copies the state, actions and outcome of one environment step.
Transition make_transition(const State& state, const std::vector<int>& actions, const StepOutcome& step);

/// Bounded FIFO; the oldest transition is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void store(Transition t);
  /// Uniform without replacement. Throws std::logic_error if size() < n.
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;
  /// Same draw as sample() without copying.
  std::vector<const Transition*> sample_refs(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

}  // namespace uavswarm
