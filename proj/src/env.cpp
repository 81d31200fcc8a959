#include "uavswarm/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uavswarm {

int apply_action(int cell, Action action, int cells_per_side) {
  const int col = cell % cells_per_side;
  const int row = cell / cells_per_side;
  int c = col;
  int r = row;
  switch (action) {
    case Action::kNorth: ++r; break;
    case Action::kSouth: --r; break;
    case Action::kEast: ++c; break;
    case Action::kWest: --c; break;
    case Action::kHover: break;
  }
  if (c < 0 || r < 0 || c >= cells_per_side || r >= cells_per_side) return cell;
  return r * cells_per_side + c;
}

double strategic_reward(double satisfied_demand_sum) {
  if (!(satisfied_demand_sum >= 0.0)) throw std::invalid_argument("demand sum must be >= 0");
  return 1.0 / (1.0 + satisfied_demand_sum);
}

void EnvConfig::validate() const {
  mission.validate();
  link.validate();
  radio.validate();
  if (max_swarm < 1) throw std::invalid_argument("max_swarm must be >= 1");
  if (num_strategic < 0 || num_strategic > mission.cell_count()) {
    throw std::invalid_argument("num_strategic out of range");
  }
  if (!(initial_demand >= 0.0)) throw std::invalid_argument("initial_demand must be >= 0");
  if (!(lambda_energy >= 0.0)) throw std::invalid_argument("lambda_energy must be >= 0");
  if (family.min_swarm < 1 || family.max_swarm < family.min_swarm || family.max_swarm > max_swarm) {
    throw std::invalid_argument("task swarm range must satisfy 1 <= min <= max <= max_swarm");
  }
  if (!family.fixed_strategic_cells.empty() &&
      static_cast<int>(family.fixed_strategic_cells.size()) != num_strategic) {
    throw std::invalid_argument("fixed strategic cells must match num_strategic");
  }
}

int state_dimension(const EnvConfig& config) {
  const int n = config.mission.cell_count();
  return n * config.max_swarm + (n + 1) * config.num_strategic + n + 1;
}

TaskSpec sample_task(std::mt19937_64& rng, const EnvConfig& config) {
  TaskSpec task;
  std::uniform_int_distribution<int> swarm(config.family.min_swarm, config.family.max_swarm);
  task.swarm_size = swarm(rng);
  if (!config.family.fixed_strategic_cells.empty()) {
    task.strategic_cells = config.family.fixed_strategic_cells;
  } else {
    std::vector<int> cells(static_cast<std::size_t>(config.mission.cell_count()));
    std::iota(cells.begin(), cells.end(), 0);
    // Partial Fisher-Yates: the first num_strategic entries are a uniform draw.
    for (int i = 0; i < config.num_strategic; ++i) {
      std::uniform_int_distribution<int> pick(i, static_cast<int>(cells.size()) - 1);
      std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(pick(rng))]);
    }
    task.strategic_cells.assign(cells.begin(), cells.begin() + config.num_strategic);
  }
  task.device_seed = rng();
  task.initial_demands.assign(task.strategic_cells.size(), config.initial_demand);
  return task;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

int Environment::active_count() const {
  int n = 0;
  for (const auto& u : world_.uavs()) n += u.active ? 1 : 0;
  return n;
}

double Environment::energy_norm() const {
  return config_.mission.p_oper_watts * config_.mission.slot_seconds();
}

void Environment::rebuild_world() {
  std::vector<IotDevice> devices =
      config_.devices.empty()
          ? default_device_layout(config_.mission, task_.device_seed, config_.radio.device_tx_watts)
          : config_.devices;
  world_ = build_grid(config_.mission, std::move(devices), task_.strategic_cells,
                      config_.initial_demand, config_.max_swarm);
  auto& strategic = world_.strategic();
  for (std::size_t i = 0; i < strategic.size() && i < task_.initial_demands.size(); ++i) {
    strategic[i].initial_demand = task_.initial_demands[i];
    strategic[i].demand = task_.initial_demands[i];
  }
  const double altitude = std::min(config_.mission.altitude_m, max_altitude_m(config_.link));
  for (auto& u : world_.uavs()) u.altitude_m = altitude;
}

std::vector<int> Environment::free_cells() const {
  std::vector<char> used(static_cast<std::size_t>(config_.mission.cell_count()), 0);
  for (const auto& u : world_.uavs()) {
    if (u.active) used[static_cast<std::size_t>(u.cell)] = 1;
  }
  std::vector<int> cells;
  for (int c = 0; c < config_.mission.cell_count(); ++c) {
    if (!used[static_cast<std::size_t>(c)]) cells.push_back(c);
  }
  return cells;
}

State Environment::reset(const TaskSpec& task, std::uint64_t seed) {
  const int cells = config_.mission.cell_count();
  if (task.swarm_size < 1 || task.swarm_size > config_.max_swarm) {
    throw std::invalid_argument("task swarm size outside [1, max_swarm]");
  }
  if (task.swarm_size > cells) throw std::invalid_argument("more UAVs than cells");
  if (static_cast<int>(task.strategic_cells.size()) != config_.num_strategic) {
    throw std::invalid_argument("task strategic cell count does not match configuration");
  }
  if (!task.start_cells.empty() && static_cast<int>(task.start_cells.size()) != task.swarm_size) {
    throw std::invalid_argument("start_cells must list one cell per UAV");
  }
  task_ = task;
  if (task_.initial_demands.empty()) {
    task_.initial_demands.assign(task_.strategic_cells.size(), config_.initial_demand);
  }
  return reset(seed);
}

State Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  rebuild_world();
  auto& uavs = world_.uavs();
  const int cells = config_.mission.cell_count();
  if (task_.swarm_size > cells) throw std::invalid_argument("more UAVs than cells");
  if (!task_.start_cells.empty()) {
    std::vector<int> sorted = task_.start_cells;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
        sorted.back() >= cells) {
      throw std::invalid_argument("start cells must be distinct and in range");
    }
  }
  std::vector<int> pool(static_cast<std::size_t>(cells));
  std::iota(pool.begin(), pool.end(), 0);
  for (int u = 0; u < config_.max_swarm; ++u) {
    auto& uav = uavs[static_cast<std::size_t>(u)];
    uav.active = u < task_.swarm_size;
    if (!uav.active) continue;
    int cell = 0;
    if (!task_.start_cells.empty()) {
      cell = task_.start_cells[static_cast<std::size_t>(u)];
    } else {
      std::uniform_int_distribution<int> pick(u, cells - 1);
      std::swap(pool[static_cast<std::size_t>(u)], pool[static_cast<std::size_t>(pick(rng_))]);
      cell = pool[static_cast<std::size_t>(u)];
    }
    uav.cell = cell;
  }
  world_.reset_frame();

  slot_ = 0;
  done_ = false;
  in_episode_ = true;
  ++episodes_started_;
  satisfied_ = 0.0;
  summary_ = EpisodeSummary{};
  summary_.swarm_size = task_.swarm_size;
  summary_.visit_counts.assign(static_cast<std::size_t>(cells), 0);
  for (const auto& s : world_.strategic()) summary_.initial_demand += s.initial_demand;
  return encode_state();
}

StepOutcome Environment::step(std::span<const int> actions) {
  if (!in_episode_ || done_) throw std::logic_error("step called on a finished episode");
  if (static_cast<int>(actions.size()) != config_.max_swarm) {
    throw std::invalid_argument("expected one action per UAV slot");
  }
  auto& uavs = world_.uavs();
  const int n = config_.max_swarm;
  const int side = config_.mission.cells_per_side;

  std::vector<int> origin(static_cast<std::size_t>(n), -1);
  std::vector<int> target(static_cast<std::size_t>(n), -1);
  for (int u = 0; u < n; ++u) {
    const auto& uav = uavs[static_cast<std::size_t>(u)];
    if (!uav.active) continue;
    const int a = actions[static_cast<std::size_t>(u)];
    if (a < 0 || a >= kNumActions) throw std::invalid_argument("action index out of range");
    origin[static_cast<std::size_t>(u)] = uav.cell;
    target[static_cast<std::size_t>(u)] = apply_action(uav.cell, static_cast<Action>(a), side);
  }

  // Cancel moves into shared cells until the assignment is collision free.
  // Every UAV that shared a cell at any round is penalised once.
  std::vector<char> collided(static_cast<std::size_t>(n), 0);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> occupancy(static_cast<std::size_t>(config_.mission.cell_count()), 0);
    for (int u = 0; u < n; ++u) {
      if (target[static_cast<std::size_t>(u)] >= 0) ++occupancy[static_cast<std::size_t>(target[static_cast<std::size_t>(u)])];
    }
    for (int u = 0; u < n; ++u) {
      const int t = target[static_cast<std::size_t>(u)];
      if (t < 0 || occupancy[static_cast<std::size_t>(t)] < 2) continue;
      collided[static_cast<std::size_t>(u)] = 1;
      if (t != origin[static_cast<std::size_t>(u)]) {
        target[static_cast<std::size_t>(u)] = origin[static_cast<std::size_t>(u)];
        changed = true;
      }
    }
  }

  const int slot = slot_ + 1;
  const double hmax = max_altitude_m(config_.link);
  const double norm = energy_norm();
  StepOutcome out;
  double reward = 0.0;
  double energy_sum = 0.0;
  int active = 0;
  out.info.uav_rewards.assign(static_cast<std::size_t>(n), 0.0);
  for (int u = 0; u < n; ++u) {
    auto& uav = uavs[static_cast<std::size_t>(u)];
    if (!uav.active) continue;
    ++active;
    const int cell = target[static_cast<std::size_t>(u)];
    const SlotAccount acc = advance_uav_slot(world_, u, cell, slot, config_.link, config_.radio);
    world_.record_visit(cell);
    ++summary_.visit_counts[static_cast<std::size_t>(cell)];
    energy_sum += acc.energy_j;
    if (world_.is_strategic(cell)) {
      summary_.strategic_energy_j += acc.energy_j;
    } else {
      summary_.non_strategic_energy_j += acc.energy_j;
    }

    const bool constraints_ok = acc.rate_ok && uav.altitude_m <= hmax &&
                                within_deadline(uav.total_delay_s(), config_.mission.t_max_seconds);
    if (!constraints_ok) ++out.info.constraint_violations;
    double& own = out.info.uav_rewards[static_cast<std::size_t>(u)];
    if (collided[static_cast<std::size_t>(u)]) {
      own -= 1.0;
      ++out.info.collisions;
    } else if (constraints_ok) {
      own += 1.0;
    }

    const int s = world_.strategic_slot_of_cell(cell);
    if (s >= 0) {
      auto& loc = world_.strategic()[static_cast<std::size_t>(s)];
      if (loc.demand > 0.0) {
        own += strategic_reward(satisfied_);
        const double served = std::min(1.0, loc.demand);
        loc.demand -= served;
        satisfied_ += served;
        ++out.info.strategic_visits;
      }
    }
  }
  if (active > 0 && norm > 0.0) {
    const double shaping = config_.lambda_energy * std::min(1.0, energy_sum / active / norm);
    for (int u = 0; u < n; ++u) {
      if (uavs[static_cast<std::size_t>(u)].active) out.info.uav_rewards[static_cast<std::size_t>(u)] -= shaping / active;
    }
  }
  for (double r : out.info.uav_rewards) reward += r;

  slot_ = slot;
  done_ = slot_ >= config_.mission.slots ||
          (config_.terminal_on_violation && out.info.constraint_violations > 0);
  out.reward = reward;
  out.done = done_;
  out.info.energy_j = energy_sum;
  out.next = encode_state();

  summary_.total_reward += reward;
  summary_.collisions += out.info.collisions;
  summary_.violations += out.info.constraint_violations;
  summary_.steps = slot_;
  summary_.satisfied_demand = satisfied_;
  if (done_) {
    std::vector<EnergyTerm> terms;
    for (const auto& uav : uavs) {
      if (uav.active) terms.push_back({uav.energy_j, uav.served_strategic});
    }
    summary_.masked_energy_j = swarm_energy_j(terms);
    summary_.coverage_satisfied = strategic_coverage_satisfied(world_);
  }
  return out;
}

void Environment::apply_swarm_event(const SwarmEvent& event) {
  if (in_episode_ && !done_) throw std::logic_error("swarm events apply only between episodes");
  if (event.episode != episodes_started_) {
    throw std::logic_error("swarm event scheduled for episode " + std::to_string(event.episode) +
                           " applied at episode boundary " + std::to_string(episodes_started_));
  }
  if (event.count < 1) throw std::invalid_argument("swarm event count must be >= 1");
  const int current = task_.swarm_size;
  const int next = event.kind == SwarmEvent::Kind::kJoin ? current + event.count : current - event.count;
  if (next < 1) throw std::invalid_argument("swarm cannot shrink below one UAV");
  if (next > config_.max_swarm) throw std::invalid_argument("swarm cannot exceed max_swarm");
  if (next > config_.mission.cell_count()) throw std::invalid_argument("more UAVs than cells");
  task_.swarm_size = next;
  if (!task_.start_cells.empty()) task_.start_cells.resize(static_cast<std::size_t>(next), -1);

  auto& uavs = world_.uavs();
  if (uavs.empty()) {
    task_.start_cells.clear();
    return;
  }
  if (event.kind == SwarmEvent::Kind::kLeave) {
    for (int u = next; u < current; ++u) uavs[static_cast<std::size_t>(u)].active = false;
    if (!task_.start_cells.empty()) task_.start_cells.resize(static_cast<std::size_t>(next));
    return;
  }
  for (int u = current; u < next; ++u) {
    std::vector<int> cells = free_cells();
    std::uniform_int_distribution<int> pick(0, static_cast<int>(cells.size()) - 1);
    const int cell = cells[static_cast<std::size_t>(pick(rng_))];
    auto& uav = uavs[static_cast<std::size_t>(u)];
    uav.active = true;
    world_.place_uav(u, cell);
    if (!task_.start_cells.empty()) task_.start_cells[static_cast<std::size_t>(u)] = cell;
  }
}

State Environment::encode_state() const {
  const int n = config_.mission.cell_count();
  State state;
  state.features.assign(static_cast<std::size_t>(state_dim()), 0.0);
  state.active.assign(static_cast<std::size_t>(config_.max_swarm), 0);
  auto& f = state.features;
  const auto& uavs = world_.uavs();
  std::size_t offset = 0;
  int active = 0;
  for (int u = 0; u < config_.max_swarm; ++u) {
    if (u < static_cast<int>(uavs.size()) && uavs[static_cast<std::size_t>(u)].active) {
      f[offset + static_cast<std::size_t>(uavs[static_cast<std::size_t>(u)].cell)] = 1.0;
      state.active[static_cast<std::size_t>(u)] = 1;
      ++active;
    }
    offset += static_cast<std::size_t>(n);
  }
  const auto& strategic = world_.strategic();
  for (int s = 0; s < config_.num_strategic; ++s) {
    if (s < static_cast<int>(strategic.size())) {
      const auto& loc = strategic[static_cast<std::size_t>(s)];
      f[offset + static_cast<std::size_t>(loc.cell_index)] = 1.0;
      f[offset + static_cast<std::size_t>(n)] =
          loc.initial_demand > 0.0 ? loc.demand / loc.initial_demand : 0.0;
    }
    offset += static_cast<std::size_t>(n + 1);
  }
  const auto& visits = world_.visit_counts();
  for (int c = 0; c < n; ++c) {
    if (c < static_cast<int>(visits.size()) && visits[static_cast<std::size_t>(c)] > 0) {
      f[offset + static_cast<std::size_t>(c)] = 1.0;
    }
  }
  offset += static_cast<std::size_t>(n);
  f[offset] = static_cast<double>(active) / config_.max_swarm;
  return state;
}

}  // namespace uavswarm
