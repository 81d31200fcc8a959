#include "uavswarm/mission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace uavswarm {

using nlohmann::json;

void MissionConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  positive(area_m, "area_m");
  positive(frame_seconds, "frame_seconds");
  positive(speed_mps, "speed_mps");
  positive(p_oper_watts, "p_oper_watts");
  positive(p_comm_watts, "p_comm_watts");
  positive(packet_bits, "packet_bits");
  positive(altitude_m, "altitude_m");
  if (!(t_max_seconds >= 0.0)) throw std::invalid_argument("t_max_seconds must be >= 0");
  if (cells_per_side < 1) throw std::invalid_argument("cells_per_side must be >= 1");
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  if (devices_per_cell < 0) throw std::invalid_argument("devices_per_cell must be >= 0");
}

std::vector<IotDevice> default_device_layout(const MissionConfig& config, std::uint64_t seed,
                                             double tx_watts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = config.cell_width();
  std::vector<IotDevice> devices;
  devices.reserve(static_cast<std::size_t>(config.cell_count() * config.devices_per_cell));
  for (int row = 0; row < config.cells_per_side; ++row) {
    for (int col = 0; col < config.cells_per_side; ++col) {
      for (int k = 0; k < config.devices_per_cell; ++k) {
        // Keep devices strictly inside the cell so association is unambiguous.
        const double x = (col + 0.05 + 0.9 * unit(rng)) * w;
        const double y = (row + 0.05 + 0.9 * unit(rng)) * w;
        devices.push_back({static_cast<int>(devices.size()), {x, y}, config.packet_bits, tx_watts});
      }
    }
  }
  return devices;
}

WorldLayout read_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout file: " + path);
  const json j = json::parse(in);
  WorldLayout layout;
  layout.area_m = j.at("area_m").get<double>();
  layout.cells_per_side = j.at("cells_per_side").get<int>();
  layout.strategic_cells = j.value("strategic_cells", std::vector<int>{});
  for (const auto& d : j.value("devices", json::array())) {
    IotDevice dev;
    dev.id = static_cast<int>(layout.devices.size());
    dev.position = {d.at("x").get<double>(), d.at("y").get<double>()};
    dev.packet_bits = d.value("packet_bits", 1.0e6);
    dev.tx_watts = d.value("tx_watts", 0.1);
    layout.devices.push_back(dev);
  }
  return layout;
}

void write_layout_file(const std::string& path, const WorldLayout& layout) {
  json devices = json::array();
  for (const auto& d : layout.devices) {
    devices.push_back({{"x", d.position[0]},
                       {"y", d.position[1]},
                       {"packet_bits", d.packet_bits},
                       {"tx_watts", d.tx_watts}});
  }
  const json j = {{"area_m", layout.area_m},
                  {"cells_per_side", layout.cells_per_side},
                  {"strategic_cells", layout.strategic_cells},
                  {"devices", devices}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write layout file: " + path);
  out << j.dump(2) << '\n';
}

Vec3 GridWorld::cell_position(int cell, double altitude_m) const {
  const auto& c = cells_.at(static_cast<std::size_t>(cell)).center;
  return {c[0], c[1], altitude_m};
}

Vec3 GridWorld::uav_position(const UavState& uav) const {
  return cell_position(uav.cell, uav.altitude_m);
}

std::optional<int> GridWorld::take_next_device(int cell) {
  const auto& list = cell_devices_[static_cast<std::size_t>(cell)];
  auto& cursor = next_pending_[static_cast<std::size_t>(cell)];
  while (cursor < list.size() && collected_[static_cast<std::size_t>(list[cursor])]) ++cursor;
  if (cursor == list.size()) return std::nullopt;
  const int device = list[cursor++];
  collected_[static_cast<std::size_t>(device)] = 1;
  return device;
}

void GridWorld::reset_frame() {
  std::fill(collected_.begin(), collected_.end(), 0);
  std::fill(next_pending_.begin(), next_pending_.end(), 0);
  std::fill(visit_counts_.begin(), visit_counts_.end(), 0);
  for (auto& s : strategic_) s.demand = s.initial_demand;
  for (auto& u : uavs_) {
    u.trajectory.clear();
    u.energy_j = 0.0;
    u.travel_s = 0.0;
    u.data_s = 0.0;
    u.served_strategic = false;
    u.rate_violation_slot.reset();
    if (u.active) u.trajectory.push_back({u.cell, 0});
  }
}

void GridWorld::place_uav(int uav, int cell) {
  auto& u = uavs_.at(static_cast<std::size_t>(uav));
  u.cell = cell;
  u.trajectory.clear();
  u.trajectory.push_back({cell, 0});
}

GridWorld build_grid(const MissionConfig& config, std::vector<IotDevice> devices,
                     const std::vector<int>& strategic_cells, double initial_demand,
                     int uav_slots) {
  config.validate();
  const int n = config.cell_count();
  GridWorld world;
  world.config_ = config;
  const double w = config.cell_width();
  world.cells_.reserve(static_cast<std::size_t>(n));
  for (int row = 0; row < config.cells_per_side; ++row) {
    for (int col = 0; col < config.cells_per_side; ++col) {
      world.cells_.push_back({row * config.cells_per_side + col, col, row,
                              {(col + 0.5) * w, (row + 0.5) * w}, false});
    }
  }

  world.strategic_of_cell_.assign(static_cast<std::size_t>(n), -1);
  for (int cell : strategic_cells) {
    if (cell < 0 || cell >= n) {
      throw std::invalid_argument("strategic cell out of range: " + std::to_string(cell));
    }
    auto& slot = world.strategic_of_cell_[static_cast<std::size_t>(cell)];
    if (slot >= 0) {
      throw std::invalid_argument("duplicate strategic cell: " + std::to_string(cell));
    }
    slot = static_cast<int>(world.strategic_.size());
    world.strategic_.push_back({slot, cell, initial_demand, initial_demand});
    world.cells_[static_cast<std::size_t>(cell)].is_strategic = true;
  }

  world.cell_devices_.assign(static_cast<std::size_t>(n), {});
  for (std::size_t i = 0; i < devices.size(); ++i) {
    auto& d = devices[i];
    d.id = static_cast<int>(i);
    if (d.position[0] < 0.0 || d.position[0] > config.area_m || d.position[1] < 0.0 ||
        d.position[1] > config.area_m) {
      throw std::invalid_argument("device " + std::to_string(i) + " lies outside the area");
    }
    if (!(d.packet_bits > 0.0)) throw std::invalid_argument("device packet_bits must be > 0");
    const int col = std::min(config.cells_per_side - 1, static_cast<int>(d.position[0] / w));
    const int row = std::min(config.cells_per_side - 1, static_cast<int>(d.position[1] / w));
    world.cell_devices_[static_cast<std::size_t>(row * config.cells_per_side + col)].push_back(d.id);
  }
  world.devices_ = std::move(devices);
  for (int cell = 0; cell < n; ++cell) {
    auto& list = world.cell_devices_[static_cast<std::size_t>(cell)];
    const Vec2 c = world.cells_[static_cast<std::size_t>(cell)].center;
    auto dist2 = [&](int id) {
      const auto& p = world.devices_[static_cast<std::size_t>(id)].position;
      return (p[0] - c[0]) * (p[0] - c[0]) + (p[1] - c[1]) * (p[1] - c[1]);
    };
    std::stable_sort(list.begin(), list.end(),
                     [&](int a, int b) { return dist2(a) < dist2(b); });
  }
  world.collected_.assign(world.devices_.size(), 0);
  world.next_pending_.assign(static_cast<std::size_t>(n), 0);
  world.visit_counts_.assign(static_cast<std::size_t>(n), 0);

  world.uavs_.resize(static_cast<std::size_t>(std::max(0, uav_slots)));
  for (int u = 0; u < uav_slots; ++u) {
    auto& uav = world.uavs_[static_cast<std::size_t>(u)];
    uav.id = u;
    uav.altitude_m = config.altitude_m;
  }
  return world;
}

double travel_time_s(const Vec3& from, const Vec3& to, double speed_mps) {
  if (!(speed_mps > 0.0)) throw std::invalid_argument("speed must be positive");
  const double dx = to[0] - from[0];
  const double dy = to[1] - from[1];
  const double dz = to[2] - from[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz) / speed_mps;
}

double data_delay_s(std::span<const Collection> collections) {
  double total = 0.0;
  for (const auto& c : collections) {
    if (!(c.rate_bps > 0.0)) throw std::domain_error("collection at non-positive rate is infeasible");
    total += c.packet_bits / c.rate_bps;
  }
  return total;
}

double completion_delay_s(const std::vector<std::vector<Vec3>>& trajectories, double speed_mps) {
  double total = 0.0;
  for (const auto& path : trajectories) {
    for (std::size_t m = 1; m < path.size(); ++m) total += travel_time_s(path[m - 1], path[m], speed_mps);
  }
  return total;
}

double total_delay_s(double d_data, double d_com) { return d_data + d_com; }

bool within_deadline(double d_tot, double t_max) { return d_tot <= t_max; }

double uav_energy_j(double d_tot_s, double d_data_s, const MissionConfig& config) {
  return config.p_oper_watts * d_tot_s + config.p_comm_watts * d_data_s;
}

double swarm_energy_j(std::span<const EnergyTerm> per_uav) {
  double total = 0.0;
  for (const auto& t : per_uav) {
    if (t.delta) total += t.energy_j;
  }
  return total;
}

bool strategic_coverage_satisfied(const GridWorld& world) {
  for (const auto& s : world.strategic()) {
    bool seen = false;
    for (const auto& u : world.uavs()) {
      if (!u.active) continue;
      seen = std::any_of(u.trajectory.begin(), u.trajectory.end(), [&](const VisitRecord& v) {
        return v.slot >= 1 && v.cell == s.cell_index;
      });
      if (seen) break;
    }
    if (!seen) return false;
  }
  return true;
}

SlotAccount advance_uav_slot(GridWorld& world, int uav, int to_cell, int slot,
                             const AirGroundParams& link, const RadioConfig& radio) {
  auto& u = world.uavs().at(static_cast<std::size_t>(uav));
  const MissionConfig& cfg = world.config();
  SlotAccount acc;
  const Vec3 from = world.uav_position(u);
  const Vec3 to = world.cell_position(to_cell, u.altitude_m);
  acc.travel_s = travel_time_s(from, to, cfg.speed_mps);
  u.cell = to_cell;
  u.trajectory.push_back({to_cell, slot});

  if (auto device = world.take_next_device(to_cell)) {
    const IotDevice& d = world.devices()[static_cast<std::size_t>(*device)];
    RadioConfig link_radio = radio;
    link_radio.device_tx_watts = d.tx_watts;
    const LinkGeometry geom{to, d.position};
    acc.device = *device;
    acc.rate_bps = achievable_rate_bps(geom, link, link_radio);
    acc.rate_ok = rate_feasible(acc.rate_bps, radio);
    const Collection c{d.packet_bits, acc.rate_bps};
    acc.data_s = data_delay_s(std::span<const Collection>(&c, 1));
    if (world.is_strategic(to_cell)) u.served_strategic = true;
    if (!acc.rate_ok && !u.rate_violation_slot) u.rate_violation_slot = slot;
  }
  acc.energy_j = uav_energy_j(acc.travel_s + acc.data_s, acc.data_s, cfg);
  u.travel_s += acc.travel_s;
  u.data_s += acc.data_s;
  u.energy_j += acc.energy_j;
  return acc;
}

}  // namespace uavswarm
