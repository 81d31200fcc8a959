#include "uavswarm/replay.hpp"

#include <numeric>
#include <stdexcept>

namespace uavswarm {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be >= 1");
}

Transition make_transition(const State& state, const std::vector<int>& actions, const StepOutcome& step) {
  Transition t;
  t.state = state;
  t.actions = actions;
  t.reward = step.reward;
  t.next = step.next;
  t.done = step.done;
  t.slot_rewards = step.info.uav_rewards;
  return t;
}

void ReplayMemory::store(Transition t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<const Transition*> ReplayMemory::sample_refs(std::size_t n, std::mt19937_64& rng) const {
  if (n > items_.size()) throw std::logic_error("replay memory holds fewer transitions than requested");
  // Partial Fisher-Yates over indices.
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(&items_[idx[i]]);
  }
  return out;
}

std::vector<Transition> ReplayMemory::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<Transition> out;
  for (const Transition* t : sample_refs(n, rng)) out.push_back(*t);
  return out;
}

}  // namespace uavswarm
