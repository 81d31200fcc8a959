#pragma once

// Grid world, IoT devices, strategic locations and the per-UAV delay and
// energy accounting of a data-collection frame.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavswarm/link_budget.hpp"

namespace uavswarm {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

struct MissionConfig {
  double area_m = 440.0;
  int cells_per_side = 5;
  double frame_seconds = 600.0;
  int slots = 10;
  double speed_mps = 10.0;
  double p_oper_watts = 300.0;
  double p_comm_watts = 5.0;
  double t_max_seconds = 600.0;
  double packet_bits = 1.0e6;
  double altitude_m = 100.0;
  int devices_per_cell = 2;

  int cell_count() const { return cells_per_side * cells_per_side; }
  double cell_width() const { return area_m / cells_per_side; }
  double slot_seconds() const { return frame_seconds / slots; }
  void validate() const;
};

struct Cell {
  int index = 0;
  int col = 0;
  int row = 0;
  Vec2 center{};
  bool is_strategic = false;
};

struct IotDevice {
  int id = 0;
  Vec2 position{};
  double packet_bits = 1.0e6;
  double tx_watts = 0.1;
};

struct StrategicLocation {
  int id = 0;
  int cell_index = 0;
  double demand = 0.0;
  double initial_demand = 0.0;
};

struct VisitRecord {
  int cell = 0;
  int slot = 0;
};

struct UavState {
  int id = 0;
  int cell = 0;
  double altitude_m = 100.0;
  // Slot 0 holds the start cell; slot m >= 1 the cell occupied after step m.
  std::vector<VisitRecord> trajectory;
  double energy_j = 0.0;
  double travel_s = 0.0;
  double data_s = 0.0;
  bool active = false;
  // delta indicator: collected from at least one device in a strategic cell.
  bool served_strategic = false;
  // First slot at which a collection fell below the rate floor, if any.
  std::optional<int> rate_violation_slot;

  double total_delay_s() const { return travel_s + data_s; }
};

/// Device positions plus the strategic-cell layout; the unit of the world
/// layout file.
struct WorldLayout {
  double area_m = 440.0;
  int cells_per_side = 5;
  std::vector<int> strategic_cells;
  std::vector<IotDevice> devices;
};

/// devices_per_cell devices placed uniformly inside every cell.
std::vector<IotDevice> default_device_layout(const MissionConfig& config, std::uint64_t seed,
                                             double tx_watts);

WorldLayout read_layout_file(const std::string& path);
void write_layout_file(const std::string& path, const WorldLayout& layout);

class GridWorld {
 public:
  GridWorld() = default;

  const MissionConfig& config() const { return config_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<IotDevice>& devices() const { return devices_; }
  const std::vector<StrategicLocation>& strategic() const { return strategic_; }
  std::vector<StrategicLocation>& strategic() { return strategic_; }
  const std::vector<UavState>& uavs() const { return uavs_; }
  std::vector<UavState>& uavs() { return uavs_; }

  int cell_index(int col, int row) const { return row * config_.cells_per_side + col; }
  Vec3 uav_position(const UavState& uav) const;
  Vec3 cell_position(int cell, double altitude_m) const;

  /// Index into strategic(), or -1.
  int strategic_slot_of_cell(int cell) const { return strategic_of_cell_[cell]; }
  bool is_strategic(int cell) const { return strategic_of_cell_[cell] >= 0; }

  /// Devices associated with a cell (nearest cell center), nearest-first.
  const std::vector<int>& cell_devices(int cell) const { return cell_devices_[cell]; }
  bool collected(int device) const { return collected_[device] != 0; }

  /// Pops the next uncollected device of the cell, nearest-first.
  std::optional<int> take_next_device(int cell);

  const std::vector<int>& visit_counts() const { return visit_counts_; }
  void record_visit(int cell) { ++visit_counts_[cell]; }

  /// Clears collections, visits, UAV accounting and restores demands.
  void reset_frame();

  /// Places a UAV slot at a cell and starts its trajectory.
  void place_uav(int uav, int cell);

 private:
  friend GridWorld build_grid(const MissionConfig&, std::vector<IotDevice>, const std::vector<int>&,
                              double, int);

  MissionConfig config_;
  std::vector<Cell> cells_;
  std::vector<IotDevice> devices_;
  std::vector<StrategicLocation> strategic_;
  std::vector<UavState> uavs_;
  std::vector<int> strategic_of_cell_;
  std::vector<std::vector<int>> cell_devices_;
  std::vector<char> collected_;
  std::vector<std::size_t> next_pending_;
  std::vector<int> visit_counts_;
};

/// Row-major grid; cell (col,row) centered at ((col+0.5)w, (row+0.5)w).
/// Throws std::invalid_argument on an out-of-range or duplicate strategic
/// cell, or a device outside the area.
GridWorld build_grid(const MissionConfig& config, std::vector<IotDevice> devices,
                     const std::vector<int>& strategic_cells, double initial_demand = 3.0,
                     int uav_slots = 0);

double travel_time_s(const Vec3& from, const Vec3& to, double speed_mps);

struct Collection {
  double packet_bits = 0.0;
  double rate_bps = 0.0;
};

/// Sum of bits/rate; throws std::domain_error on a non-positive rate.
double data_delay_s(std::span<const Collection> collections);

/// Sum of leg travel times over every UAV trajectory.
double completion_delay_s(const std::vector<std::vector<Vec3>>& trajectories, double speed_mps);

double total_delay_s(double d_data, double d_com);
bool within_deadline(double d_tot, double t_max);

double uav_energy_j(double d_tot_s, double d_data_s, const MissionConfig& config);

struct EnergyTerm {
  double energy_j = 0.0;
  bool delta = false;
};

/// delta-masked swarm energy.
double swarm_energy_j(std::span<const EnergyTerm> per_uav);

/// Every strategic location occupied at some slot >= 1 by an active UAV.
bool strategic_coverage_satisfied(const GridWorld& world);

/// Result of moving one UAV for one slot and collecting at its destination.
struct SlotAccount {
  double travel_s = 0.0;
  double data_s = 0.0;
  double energy_j = 0.0;
  int device = -1;
  double rate_bps = 0.0;
  bool rate_ok = true;
};

/// Advances one UAV by one slot: moves it to `to_cell`, collects the next
/// pending device there, and adds the leg to its delay/energy accounting.
SlotAccount advance_uav_slot(GridWorld& world, int uav, int to_cell, int slot,
                             const AirGroundParams& link, const RadioConfig& radio);

}  // namespace uavswarm
