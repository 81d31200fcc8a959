#pragma once

// Exhaustive minimum-energy trajectory search on desk-size instances.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "uavswarm/link_budget.hpp"
#include "uavswarm/mission.hpp"

namespace uavswarm {

struct ExactInstance {
  MissionConfig mission;
  AirGroundParams link;
  RadioConfig radio;
  std::vector<IotDevice> devices;
  std::vector<int> strategic_cells;
  std::vector<int> start_cells;  // one per UAV
  int horizon = 1;
  // Unset: the link's max_altitude_m.
  std::optional<double> altitude_bound_m;
  // Literal reading: every UAV must visit every strategic cell.
  bool strict_coverage = false;
  std::uint64_t budget = 10'000'000;

  int uav_count() const { return static_cast<int>(start_cells.size()); }
  double altitude_bound() const;
  /// Throws std::invalid_argument for a malformed instance.
  void validate() const;
};

/// Cells per UAV, horizon + 1 entries each (entry 0 is the start cell).
using Trajectory = std::vector<std::vector<int>>;

struct FeasibilityReport {
  bool rate_ok = true;       // minimum data rate on every collection
  bool altitude_ok = true;   // altitude below the SNR bound
  bool deadline_ok = true;   // D_tot <= T_max for every UAV
  bool coverage_ok = true;   // strategic locations visited
  std::optional<int> rate_violation_slot;
  std::optional<int> altitude_violation_slot;
  std::optional<int> deadline_violation_slot;
  double objective_j = 0.0;        // delta-masked swarm energy
  double unmasked_energy_j = 0.0;  // plain sum over UAVs
  std::vector<double> uav_energy_j;
  std::vector<bool> uav_delta;

  bool feasible() const { return rate_ok && altitude_ok && deadline_ok && coverage_ok; }
};

struct ExactSolution {
  bool feasible = false;
  Trajectory trajectory;
  // actions[m][u] for slot m+1
  std::vector<std::vector<int>> actions;
  double objective_j = 0.0;
  double unmasked_energy_j = 0.0;
  std::uint64_t enumerated = 0;
  std::uint64_t feasible_count = 0;
};

/// Enumerates every joint action sequence in lexicographic order and keeps
/// the feasible one with the least (masked objective, unmasked energy);
/// remaining ties go to the lexicographically first sequence. Throws
/// std::length_error when (5^U)^H exceeds the budget. An infeasible instance
/// returns feasible == false.
ExactSolution enumerate_optimum(const ExactInstance& inst);

/// Recomputes constraints and energy for a trajectory from the mission-level
/// delay/energy formulas. Throws std::invalid_argument when the trajectory
/// has the wrong shape or takes a non-grid step.
FeasibilityReport verify_feasibility(const Trajectory& trajectory, const ExactInstance& inst);

/// Visits the objective of every feasible action sequence; used to certify
/// optimality by a full re-scan.
void for_each_feasible(const ExactInstance& inst,
                       const std::function<void(const std::vector<int>& joint_actions, double objective,
                                                double unmasked)>& visit);

}  // namespace uavswarm
