#pragma once

// The swarm coverage MDP: state encoding, joint grid moves with collision
// resolution, reward shaping, swarm join/leave events and the task family
// used for meta-learning.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "uavswarm/link_budget.hpp"
#include "uavswarm/mission.hpp"

namespace uavswarm {

enum class Action : int { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3, kHover = 4 };
inline constexpr int kNumActions = 5;

/// Cell reached by an action; off-grid moves hover.
int apply_action(int cell, Action action, int cells_per_side);

struct TaskDistribution {
  int min_swarm = 3;
  int max_swarm = 7;
  // Non-empty: every task reuses these strategic cells.
  std::vector<int> fixed_strategic_cells;
};

struct TaskSpec {
  int swarm_size = 4;
  std::vector<int> strategic_cells;
  std::uint64_t device_seed = 0;
  std::vector<double> initial_demands;
  // Empty: start cells are sampled at reset.
  std::vector<int> start_cells;
};

struct SwarmEvent {
  enum class Kind { kJoin, kLeave };
  int episode = 0;
  Kind kind = Kind::kJoin;
  int count = 1;
};

struct EnvConfig {
  MissionConfig mission;
  AirGroundParams link;
  RadioConfig radio;
  int max_swarm = 7;
  int num_strategic = 3;
  double initial_demand = 3.0;
  double lambda_energy = 0.1;
  bool terminal_on_violation = false;
  TaskDistribution family;
  // Non-empty: fixed device layout instead of the seeded generator.
  std::vector<IotDevice> devices;

  void validate() const;
};

struct State {
  std::vector<double> features;
  // One flag per UAV slot (max_swarm entries).
  std::vector<std::uint8_t> active;

  bool operator==(const State&) const = default;
};

struct StepInfo {
  double energy_j = 0.0;
  int collisions = 0;
  int constraint_violations = 0;
  int strategic_visits = 0;
  // Per UAV slot share of the reward (zero for inactive slots); sums to the
  // step reward. The energy term is split evenly over the active UAVs.
  std::vector<double> uav_rewards;
};

struct StepOutcome {
  State next;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct EpisodeSummary {
  double total_reward = 0.0;
  double strategic_energy_j = 0.0;
  double non_strategic_energy_j = 0.0;
  double masked_energy_j = 0.0;
  double satisfied_demand = 0.0;
  double initial_demand = 0.0;
  int collisions = 0;
  int violations = 0;
  int steps = 0;
  int swarm_size = 0;
  bool coverage_satisfied = false;
  std::vector<int> visit_counts;

  double unmasked_energy_j() const { return strategic_energy_j + non_strategic_energy_j; }
  double satisfaction() const {
    return initial_demand > 0.0 ? satisfied_demand / initial_demand : 1.0;
  }
};

/// 1 / (1 + satisfied_demand_sum)
double strategic_reward(double satisfied_demand_sum);

TaskSpec sample_task(std::mt19937_64& rng, const EnvConfig& config);

/// Dimension of the encoded state for a configuration.
int state_dimension(const EnvConfig& config);

class Environment {
 public:
  explicit Environment(EnvConfig config);

  State reset(const TaskSpec& task, std::uint64_t seed);
  /// Reset with the current task (as modified by swarm events).
  State reset(std::uint64_t seed);

  /// actions holds one entry per UAV slot; entries for inactive slots are
  /// ignored. Throws std::logic_error once the episode is done.
  StepOutcome step(std::span<const int> actions);

  void apply_swarm_event(const SwarmEvent& event);

  State encode_state() const;

  const EnvConfig& config() const { return config_; }
  const GridWorld& world() const { return world_; }
  const TaskSpec& task() const { return task_; }
  int state_dim() const { return state_dimension(config_); }
  int slot() const { return slot_; }
  bool done() const { return done_; }
  int episodes_started() const { return episodes_started_; }
  int active_count() const;
  double energy_norm() const;
  const EpisodeSummary& summary() const { return summary_; }

 private:
  void rebuild_world();
  std::vector<int> free_cells() const;

  EnvConfig config_;
  TaskSpec task_;
  GridWorld world_;
  std::mt19937_64 rng_;
  int slot_ = 0;
  bool done_ = true;
  bool in_episode_ = false;
  int episodes_started_ = 0;
  double satisfied_ = 0.0;
  EpisodeSummary summary_;
};

}  // namespace uavswarm
