#include "uavswarm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uavswarm/env.hpp"

namespace uavswarm {

double ExactInstance::altitude_bound() const {
  return altitude_bound_m ? *altitude_bound_m : max_altitude_m(link);
}

void ExactInstance::validate() const {
  mission.validate();
  link.validate();
  radio.validate();
  if (horizon < 1) throw std::invalid_argument("oracle horizon must be >= 1");
  if (start_cells.empty()) throw std::invalid_argument("oracle instance needs at least one UAV");
  for (int c : start_cells) {
    if (c < 0 || c >= mission.cell_count()) throw std::invalid_argument("start cell out of range");
  }
  if (strategic_cells.size() > 64) throw std::invalid_argument("at most 64 strategic cells supported");
}

namespace {

std::uint64_t joint_space(int uavs, int horizon, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (int i = 0; i < uavs * horizon; ++i) {
    if (total > cap / kNumActions) return cap + 1;
    total *= kNumActions;
  }
  return total;
}

struct CellData {
  std::vector<double> data_s;  // k-th collection in this cell
  std::vector<char> rate_ok;
};

// Precomputed per-instance tables plus a depth-first walk over joint action
// sequences in lexicographic order.
class Enumerator {
 public:
  explicit Enumerator(const ExactInstance& inst) : inst_(inst) {
    inst_.validate();
    uavs_ = inst.uav_count();
    side_ = inst.mission.cells_per_side;
    cells_ = inst.mission.cell_count();
    joint_ = 1;
    for (int u = 0; u < uavs_; ++u) joint_ *= kNumActions;
    GridWorld world = build_grid(inst.mission, inst.devices, inst.strategic_cells, 1.0, 0);
    strategic_slot_.assign(static_cast<std::size_t>(cells_), -1);
    for (std::size_t s = 0; s < inst.strategic_cells.size(); ++s) {
      strategic_slot_[static_cast<std::size_t>(inst.strategic_cells[s])] = static_cast<int>(s);
    }
    cell_data_.resize(static_cast<std::size_t>(cells_));
    const double altitude = inst.mission.altitude_m;
    for (int c = 0; c < cells_; ++c) {
      const Vec3 pos = world.cell_position(c, altitude);
      for (int id : world.cell_devices(c)) {
        const IotDevice& d = world.devices()[static_cast<std::size_t>(id)];
        RadioConfig radio = inst.radio;
        radio.device_tx_watts = d.tx_watts;
        const double rate = achievable_rate_bps(LinkGeometry{pos, d.position}, inst.link, radio);
        cell_data_[static_cast<std::size_t>(c)].data_s.push_back(d.packet_bits / rate);
        cell_data_[static_cast<std::size_t>(c)].rate_ok.push_back(rate_feasible(rate, inst.radio) ? 1 : 0);
      }
    }
    leg_s_ = inst.mission.cell_width() / inst.mission.speed_mps;
    altitude_ok_ = altitude <= inst.altitude_bound();
    all_strategic_ = inst.strategic_cells.size() == 64 ? ~0ULL
                                                       : ((1ULL << inst.strategic_cells.size()) - 1ULL);
  }

  using Visit = std::function<void(const std::vector<int>&, double, double)>;

  // prune: skip subtrees that already violate the deadline or rate floor.
  void run(const Visit& visit, bool prune) {
    visit_ = &visit;
    prune_ = prune;
    enumerated_ = 0;
    Frame f;
    f.cell.assign(inst_.start_cells.begin(), inst_.start_cells.end());
    f.cursor.assign(static_cast<std::size_t>(cells_), 0);
    f.travel.assign(static_cast<std::size_t>(uavs_), 0.0);
    f.data.assign(static_cast<std::size_t>(uavs_), 0.0);
    f.energy.assign(static_cast<std::size_t>(uavs_), 0.0);
    f.served.assign(static_cast<std::size_t>(uavs_), 0);
    f.visited.assign(static_cast<std::size_t>(uavs_), 0);
    sequence_.assign(static_cast<std::size_t>(inst_.horizon), 0);
    descend(f, 0);
  }

  std::uint64_t enumerated() const { return enumerated_; }
  int uavs() const { return uavs_; }
  int side() const { return side_; }

 private:
  struct Frame {
    std::vector<int> cell;
    std::vector<int> cursor;
    std::vector<double> travel;
    std::vector<double> data;
    std::vector<double> energy;
    std::vector<char> served;
    std::vector<std::uint64_t> visited;
    bool rate_ok = true;
  };

  bool deadline_ok(const Frame& f) const {
    for (int u = 0; u < uavs_; ++u) {
      if (!within_deadline(f.travel[static_cast<std::size_t>(u)] + f.data[static_cast<std::size_t>(u)],
                           inst_.mission.t_max_seconds)) {
        return false;
      }
    }
    return true;
  }

  bool coverage_ok(const Frame& f) const {
    if (inst_.strict_coverage) {
      return std::all_of(f.visited.begin(), f.visited.end(),
                         [&](std::uint64_t v) { return v == all_strategic_; });
    }
    std::uint64_t any = 0;
    for (auto v : f.visited) any |= v;
    return any == all_strategic_;
  }

  void descend(const Frame& f, int depth) {
    if (depth == inst_.horizon) {
      ++enumerated_;
      if (!altitude_ok_ || !f.rate_ok || !deadline_ok(f) || !coverage_ok(f)) return;
      double masked = 0.0;
      double unmasked = 0.0;
      for (int u = 0; u < uavs_; ++u) {
        unmasked += f.energy[static_cast<std::size_t>(u)];
        if (f.served[static_cast<std::size_t>(u)]) masked += f.energy[static_cast<std::size_t>(u)];
      }
      (*visit_)(sequence_, masked, unmasked);
      return;
    }
    const auto& mission = inst_.mission;
    for (int j = 0; j < joint_; ++j) {
      sequence_[static_cast<std::size_t>(depth)] = j;
      Frame next = f;
      int code = j;
      std::vector<int> actions(static_cast<std::size_t>(uavs_));
      for (int u = uavs_ - 1; u >= 0; --u) {
        actions[static_cast<std::size_t>(u)] = code % kNumActions;
        code /= kNumActions;
      }
      for (int u = 0; u < uavs_; ++u) {
        const auto su = static_cast<std::size_t>(u);
        const int from = next.cell[su];
        const int to = apply_action(from, static_cast<Action>(actions[su]), side_);
        const double travel = to == from ? 0.0 : leg_s_;
        double data = 0.0;
        auto& cursor = next.cursor[static_cast<std::size_t>(to)];
        const CellData& cd = cell_data_[static_cast<std::size_t>(to)];
        if (cursor < static_cast<int>(cd.data_s.size())) {
          data = cd.data_s[static_cast<std::size_t>(cursor)];
          if (!cd.rate_ok[static_cast<std::size_t>(cursor)]) next.rate_ok = false;
          ++cursor;
          if (strategic_slot_[static_cast<std::size_t>(to)] >= 0) next.served[su] = 1;
        }
        const int s = strategic_slot_[static_cast<std::size_t>(to)];
        if (s >= 0) next.visited[su] |= 1ULL << s;
        next.cell[su] = to;
        next.travel[su] += travel;
        next.data[su] += data;
        next.energy[su] += uav_energy_j(travel + data, data, mission);
      }
      if (prune_ && (!next.rate_ok || !deadline_ok(next))) {
        enumerated_ += joint_space(uavs_, inst_.horizon - depth - 1, ~0ULL);
        continue;
      }
      descend(next, depth + 1);
    }
  }

  ExactInstance inst_;
  int uavs_ = 0;
  int side_ = 0;
  int cells_ = 0;
  int joint_ = 1;
  double leg_s_ = 0.0;
  bool altitude_ok_ = true;
  std::uint64_t all_strategic_ = 0;
  std::vector<int> strategic_slot_;
  std::vector<CellData> cell_data_;
  std::vector<int> sequence_;
  const Visit* visit_ = nullptr;
  bool prune_ = true;
  std::uint64_t enumerated_ = 0;
};

bool nearly_less(double a, double b) {
  const double tol = 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  return a < b - tol;
}

bool nearly_equal(double a, double b) { return !nearly_less(a, b) && !nearly_less(b, a); }

}  // namespace

ExactSolution enumerate_optimum(const ExactInstance& inst) {
  inst.validate();
  const std::uint64_t space = joint_space(inst.uav_count(), inst.horizon, inst.budget);
  if (space > inst.budget) {
    throw std::length_error("joint trajectory space exceeds the enumeration budget of " +
                            std::to_string(inst.budget));
  }
  Enumerator e(inst);
  ExactSolution best;
  std::vector<int> best_sequence;
  e.run(
      [&](const std::vector<int>& seq, double masked, double unmasked) {
        ++best.feasible_count;
        const bool better =
            !best.feasible || nearly_less(masked, best.objective_j) ||
            (nearly_equal(masked, best.objective_j) && nearly_less(unmasked, best.unmasked_energy_j));
        if (better) {
          best.feasible = true;
          best.objective_j = masked;
          best.unmasked_energy_j = unmasked;
          best_sequence = seq;
        }
      },
      true);
  best.enumerated = e.enumerated();
  if (!best.feasible) return best;

  const int uavs = inst.uav_count();
  const int side = inst.mission.cells_per_side;
  best.trajectory.assign(static_cast<std::size_t>(uavs), {});
  for (int u = 0; u < uavs; ++u) best.trajectory[static_cast<std::size_t>(u)].push_back(inst.start_cells[static_cast<std::size_t>(u)]);
  for (int code : best_sequence) {
    std::vector<int> actions(static_cast<std::size_t>(uavs));
    for (int u = uavs - 1; u >= 0; --u) {
      actions[static_cast<std::size_t>(u)] = code % kNumActions;
      code /= kNumActions;
    }
    for (int u = 0; u < uavs; ++u) {
      auto& path = best.trajectory[static_cast<std::size_t>(u)];
      path.push_back(apply_action(path.back(), static_cast<Action>(actions[static_cast<std::size_t>(u)]), side));
    }
    best.actions.push_back(std::move(actions));
  }
  return best;
}

void for_each_feasible(const ExactInstance& inst,
                       const std::function<void(const std::vector<int>&, double, double)>& visit) {
  const std::uint64_t space = joint_space(inst.uav_count(), inst.horizon, inst.budget);
  if (space > inst.budget) throw std::length_error("joint trajectory space exceeds the enumeration budget");
  Enumerator e(inst);
  e.run(visit, false);
}

FeasibilityReport verify_feasibility(const Trajectory& trajectory, const ExactInstance& inst) {
  inst.validate();
  const int uavs = inst.uav_count();
  const int side = inst.mission.cells_per_side;
  if (static_cast<int>(trajectory.size()) != uavs) {
    throw std::invalid_argument("trajectory must hold one path per UAV");
  }
  for (int u = 0; u < uavs; ++u) {
    const auto& path = trajectory[static_cast<std::size_t>(u)];
    if (static_cast<int>(path.size()) != inst.horizon + 1) {
      throw std::invalid_argument("trajectory length does not match the horizon");
    }
    if (path.front() != inst.start_cells[static_cast<std::size_t>(u)]) {
      throw std::invalid_argument("trajectory does not begin at the UAV start cell");
    }
    for (std::size_t m = 0; m < path.size(); ++m) {
      if (path[m] < 0 || path[m] >= inst.mission.cell_count()) {
        throw std::invalid_argument("trajectory cell out of range");
      }
      if (m == 0) continue;
      const int dc = std::abs(path[m] % side - path[m - 1] % side);
      const int dr = std::abs(path[m] / side - path[m - 1] / side);
      if (dc + dr > 1) throw std::invalid_argument("trajectory takes a non-grid step");
    }
  }

  FeasibilityReport report;
  GridWorld world = build_grid(inst.mission, inst.devices, inst.strategic_cells, 1.0, 0);
  const double altitude = inst.mission.altitude_m;
  if (altitude > inst.altitude_bound()) {
    report.altitude_ok = false;
    report.altitude_violation_slot = 0;
  }

  std::vector<std::vector<Collection>> collections(static_cast<std::size_t>(uavs));
  std::vector<std::vector<Vec3>> positions(static_cast<std::size_t>(uavs));
  std::vector<bool> delta(static_cast<std::size_t>(uavs), false);
  std::vector<std::vector<bool>> visited(static_cast<std::size_t>(uavs),
                                         std::vector<bool>(inst.strategic_cells.size(), false));
  for (int u = 0; u < uavs; ++u) {
    positions[static_cast<std::size_t>(u)].push_back(
        world.cell_position(trajectory[static_cast<std::size_t>(u)][0], altitude));
  }
  for (int m = 1; m <= inst.horizon; ++m) {
    for (int u = 0; u < uavs; ++u) {
      const auto su = static_cast<std::size_t>(u);
      const int cell = trajectory[su][static_cast<std::size_t>(m)];
      const Vec3 pos = world.cell_position(cell, altitude);
      positions[su].push_back(pos);
      if (auto dev = world.take_next_device(cell)) {
        const IotDevice& d = world.devices()[static_cast<std::size_t>(*dev)];
        RadioConfig radio = inst.radio;
        radio.device_tx_watts = d.tx_watts;
        const double rate = achievable_rate_bps(LinkGeometry{pos, d.position}, inst.link, radio);
        collections[su].push_back({d.packet_bits, rate});
        if (!rate_feasible(rate, inst.radio) && report.rate_ok) {
          report.rate_ok = false;
          report.rate_violation_slot = m;
        }
        if (world.is_strategic(cell)) delta[su] = true;
      }
      for (std::size_t s = 0; s < inst.strategic_cells.size(); ++s) {
        if (inst.strategic_cells[s] == cell) visited[su][s] = true;
      }
      // Deadline check on the prefix up to slot m.
      const double d_tot = total_delay_s(data_delay_s(collections[su]),
                                         completion_delay_s({positions[su]}, inst.mission.speed_mps));
      if (!within_deadline(d_tot, inst.mission.t_max_seconds) && report.deadline_ok) {
        report.deadline_ok = false;
        report.deadline_violation_slot = m;
      }
    }
  }

  for (std::size_t s = 0; s < inst.strategic_cells.size(); ++s) {
    bool any = false;
    bool all = true;
    for (int u = 0; u < uavs; ++u) {
      any = any || visited[static_cast<std::size_t>(u)][s];
      all = all && visited[static_cast<std::size_t>(u)][s];
    }
    if (inst.strict_coverage ? !all : !any) report.coverage_ok = false;
  }

  std::vector<EnergyTerm> terms;
  for (int u = 0; u < uavs; ++u) {
    const auto su = static_cast<std::size_t>(u);
    const double d_data = data_delay_s(collections[su]);
    const double d_com = completion_delay_s({positions[su]}, inst.mission.speed_mps);
    const double energy = uav_energy_j(total_delay_s(d_data, d_com), d_data, inst.mission);
    report.uav_energy_j.push_back(energy);
    report.uav_delta.push_back(delta[su]);
    report.unmasked_energy_j += energy;
    terms.push_back({energy, delta[su]});
  }
  report.objective_j = swarm_energy_j(terms);
  return report;
}

}  // namespace uavswarm
