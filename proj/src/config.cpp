#include "uavswarm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern char** environ;

namespace uavswarm {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

OptimizerConfig::Kind optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerConfig::Kind::kAdam;
  if (name == "sgd") return OptimizerConfig::Kind::kSgd;
  throw ConfigError("agent.optimizer must be \"adam\" or \"sgd\", got \"" + name + "\"");
}

AltitudeBoundForm altitude_form(const std::string& name) {
  if (name == "square_root") return AltitudeBoundForm::kSquareRoot;
  if (name == "literal") return AltitudeBoundForm::kLiteral;
  throw ConfigError("link.altitude_bound_form must be \"square_root\" or \"literal\"");
}

SwarmEvent parse_event(const json& j) {
  for (const auto& [key, _] : j.items()) {
    require(key == "episode" || key == "kind" || key == "count",
            "unknown key in tasks.events entry: " + key);
  }
  SwarmEvent e;
  e.episode = j.at("episode").get<int>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "join") {
    e.kind = SwarmEvent::Kind::kJoin;
  } else if (kind == "leave") {
    e.kind = SwarmEvent::Kind::kLeave;
  } else {
    throw ConfigError("tasks.events kind must be \"join\" or \"leave\", got \"" + kind + "\"");
  }
  e.count = j.value("count", 1);
  require(e.episode >= 0, "tasks.events episode must be >= 0");
  require(e.count >= 1, "tasks.events count must be >= 1");
  return e;
}

// Link constants: preset propagation values, then per-key dB overrides.
AirGroundParams parse_link(const json& j, const RadioConfig& radio) {
  AirGroundParams p = environment_preset(j.at("environment").get<std::string>());
  if (!j.at("omega1").is_null()) p.omega1 = j.at("omega1").get<double>();
  if (!j.at("omega2").is_null()) p.omega2 = j.at("omega2").get<double>();
  if (!j.at("psi_los_db").is_null()) p.psi_los = db_to_linear(j.at("psi_los_db").get<double>());
  if (!j.at("psi_nlos_db").is_null()) p.psi_nlos = db_to_linear(j.at("psi_nlos_db").get<double>());
  p.carrier_hz = j.at("carrier_hz").get<double>();
  p.noise_watts = dbm_to_watts(j.at("noise_dbm").get<double>());
  if (j.at("noise_is_density").get<bool>()) p.noise_watts *= radio.bandwidth_hz;
  p.min_snr = db_to_linear(j.at("min_snr_db").get<double>());
  p.max_tx_watts = j.at("max_tx_watts").get<double>();
  return p;
}

RadioConfig parse_radio(const json& j) {
  RadioConfig r;
  r.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  r.device_tx_watts = j.at("device_tx_watts").get<double>();
  r.rate_floor_bps = j.at("rate_floor_bps").get<double>();
  return r;
}

MissionConfig parse_mission(const json& j) {
  MissionConfig m;
  m.area_m = j.at("area_m").get<double>();
  m.cells_per_side = j.at("cells_per_side").get<int>();
  m.frame_seconds = j.at("frame_seconds").get<double>();
  m.slots = j.at("slots").get<int>();
  m.speed_mps = j.at("speed_mps").get<double>();
  m.p_oper_watts = j.at("p_oper_watts").get<double>();
  m.p_comm_watts = j.at("p_comm_watts").get<double>();
  m.t_max_seconds = j.at("t_max_seconds").is_null() ? m.frame_seconds
                                                    : j.at("t_max_seconds").get<double>();
  m.packet_bits = j.at("packet_bits").get<double>();
  m.altitude_m = j.at("altitude_m").get<double>();
  m.devices_per_cell = j.at("devices_per_cell").get<int>();
  return m;
}

AgentConfig parse_agent(const json& j) {
  AgentConfig a;
  a.hidden = j.at("hidden").get<std::vector<int>>();
  a.gamma = j.at("gamma").get<double>();
  a.learning_rate = j.at("learning_rate").get<double>();
  a.optimizer = optimizer_kind(j.at("optimizer").get<std::string>());
  a.max_grad_norm = j.at("max_grad_norm").get<double>();
  a.entropy_coef = j.at("entropy_coef").get<double>();
  a.entropy_coef_final = j.at("entropy_coef_final").get<double>();
  a.replay_capacity = j.at("replay_capacity").get<int>();
  a.minibatch = j.at("minibatch").get<int>();
  a.dqn_target_interval = j.at("dqn_target_interval").get<int>();
  a.ppo_clip = j.at("ppo_clip").get<double>();
  a.ppo_epochs = j.at("ppo_epochs").get<int>();
  a.meta_outer_rate = j.at("meta_outer_rate").get<double>();
  a.meta_inner_steps = j.at("meta_inner_steps").get<int>();
  a.meta_tasks_per_iteration = j.at("meta_tasks_per_iteration").get<int>();
  a.meta_iterations = j.at("meta_iterations").get<int>();
  a.epsilon_start = j.at("epsilon_start").get<double>();
  a.epsilon_end = j.at("epsilon_end").get<double>();
  a.epsilon_decay_fraction = j.at("epsilon_decay_fraction").get<double>();
  return a;
}

std::vector<IotDevice> parse_devices(const json& arr) {
  std::vector<IotDevice> out;
  for (const auto& d : arr) {
    IotDevice dev;
    dev.id = static_cast<int>(out.size());
    dev.position = {d.at("x").get<double>(), d.at("y").get<double>()};
    dev.packet_bits = d.value("packet_bits", 1.0e6);
    dev.tx_watts = d.value("tx_watts", 0.1);
    out.push_back(dev);
  }
  return out;
}

// Rethrows module validation errors as ConfigError with a section prefix.
template <typename F>
void validated(const std::string& section, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "meta_rl") return Algorithm::kMetaRl;
  if (name == "actor_critic") return Algorithm::kActorCritic;
  if (name == "dqn") return Algorithm::kDqn;
  if (name == "ppo") return Algorithm::kPpo;
  if (name == "random") return Algorithm::kRandom;
  throw ConfigError("unknown algorithm \"" + name +
                    "\" (expected meta_rl, actor_critic, dqn, ppo or random)");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kMetaRl: return "meta_rl";
    case Algorithm::kActorCritic: return "actor_critic";
    case Algorithm::kDqn: return "dqn";
    case Algorithm::kPpo: return "ppo";
    case Algorithm::kRandom: return "random";
  }
  return "unknown";
}

json default_config_json() {
  return json{
      {"scenario", "default"},
      {"algorithm", "meta_rl"},
      {"episodes", 1000},
      {"seeds", {1}},
      {"output_dir", "out"},
      {"single_thread", false},
      {"baseline_episodes", 50},
      {"link",
       {{"environment", "urban"},
        {"omega1", nullptr},
        {"omega2", nullptr},
        {"psi_los_db", nullptr},
        {"psi_nlos_db", nullptr},
        {"carrier_hz", 2.0e9},
        {"noise_dbm", -170.0},
        {"noise_is_density", false},
        {"min_snr_db", 10.0},
        {"max_tx_watts", 0.2},
        {"altitude_bound_form", "square_root"}}},
      {"radio", {{"bandwidth_hz", 1.0e6}, {"device_tx_watts", 0.1}, {"rate_floor_bps", 1.0e6}}},
      {"mission",
       {{"area_m", 440.0},
        {"cells_per_side", 5},
        {"frame_seconds", 600.0},
        {"slots", 10},
        {"speed_mps", 10.0},
        {"p_oper_watts", 300.0},
        {"p_comm_watts", 5.0},
        {"t_max_seconds", nullptr},
        {"packet_bits", 1.0e6},
        {"altitude_m", 100.0},
        {"devices_per_cell", 2},
        {"layout_file", nullptr}}},
      {"env", {{"max_swarm", 7}, {"lambda_energy", 0.1}, {"terminal_on_violation", false}}},
      {"task",
       {{"swarm_size", 4},
        {"strategic_cells", {6, 13, 22}},
        {"device_seed", 7},
        {"start_cells", json::array()}}},
      {"tasks",
       {{"min_swarm", 3},
        {"max_swarm", 7},
        {"num_strategic", 3},
        {"demand", 3.0},
        {"fixed_strategic", true},
        {"events", json::array()}}},
      {"agent",
       {{"hidden", {64, 64}},
        {"gamma", 0.85},
        {"learning_rate", 1e-3},
        {"optimizer", "adam"},
        {"max_grad_norm", 0.0},
        {"entropy_coef", 0.03},
        {"entropy_coef_final", 0.03},
        {"replay_capacity", 10000},
        {"minibatch", 64},
        {"dqn_target_interval", 100},
        {"ppo_clip", 0.2},
        {"ppo_epochs", 4},
        {"meta_outer_rate", 0.5},
        {"meta_inner_steps", 10},
        {"meta_tasks_per_iteration", 3},
        {"meta_iterations", 3000},
        {"epsilon_start", 0.9},
        {"epsilon_end", 0.05},
        {"epsilon_decay_fraction", 0.6}}},
  };
}

json scenario_preset(const std::string& name) {
  if (name == "default" || name == "fig2" || name == "fig4") return json::object();
  if (name == "fig3") {
    return json{{"episodes", 3000},
                {"task", {{"swarm_size", 4}}},
                {"tasks",
                 {{"events",
                   {{{"episode", 1000}, {"kind", "join"}, {"count", 1}},
                    {{"episode", 2000}, {"kind", "leave"}, {"count", 2}}}}}}};
  }
  throw ConfigError("unknown scenario \"" + name + "\" (expected default, fig2, fig3 or fig4)");
}

void merge_known_keys(json& base, const json& overlay, const std::string& path) {
  require(overlay.is_object(), "config " + (path.empty() ? std::string("document") : path) +
                                   " must be a JSON object");
  for (const auto& [key, value] : overlay.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    require(base.contains(key), "unknown config key: " + full);
    auto& slot = base[key];
    if (slot.is_object()) {
      merge_known_keys(slot, value, full);
    } else {
      slot = value;
    }
  }
}

std::map<std::string, std::string> uavswarm_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry(*e);
    if (entry.rfind("UAVSWARM_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    out.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return out;
}

void apply_env_overrides(json& config, const std::map<std::string, std::string>& env) {
  constexpr std::string_view kPrefix = "UAVSWARM_";
  for (const auto& [name, raw] : env) {
    if (name.rfind(kPrefix, 0) != 0) continue;
    std::vector<std::string> parts;
    std::string rest = lower(name.substr(kPrefix.size()));
    for (std::size_t pos; (pos = rest.find("__")) != std::string::npos;) {
      parts.push_back(rest.substr(0, pos));
      rest = rest.substr(pos + 2);
    }
    parts.push_back(rest);
    // Variables whose first segment is not a config section belong to
    // other subsystems (for example UAVSWARM_ISA).
    if (!config.contains(parts.front())) continue;

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json overlay = value;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) overlay = json{{*it, overlay}};
    try {
      merge_known_keys(config, overlay);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (from environment variable " + name + ")");
    }
  }
}

void ExperimentConfig::validate() const {
  require(episodes >= 1, "episodes must be >= 1");
  require(!seeds.empty(), "seeds must be non-empty");
  require(baseline_episodes >= 1, "baseline_episodes must be >= 1");
  require(!output_dir.empty(), "output_dir must be non-empty");
  validated("env", [&] { env.validate(); });
  validated("agent", [&] { agent.validate(); });
  require(task.swarm_size >= 1 && task.swarm_size <= env.max_swarm,
          "task.swarm_size must lie in [1, env.max_swarm]");
  require(static_cast<int>(task.strategic_cells.size()) == env.num_strategic,
          "task.strategic_cells must list tasks.num_strategic cells");
  for (int c : task.strategic_cells) {
    require(c >= 0 && c < env.mission.cell_count(), "task.strategic_cells entry out of range");
  }
  require(task.start_cells.empty() ||
              static_cast<int>(task.start_cells.size()) == task.swarm_size,
          "task.start_cells must be empty or list one cell per UAV");
  for (int c : task.start_cells) {
    require(c >= 0 && c < env.mission.cell_count(), "task.start_cells entry out of range");
  }
  int size = task.swarm_size;
  int last = -1;
  for (const auto& e : events) {
    require(e.episode > last, "tasks.events must have strictly increasing episodes");
    last = e.episode;
    size += e.kind == SwarmEvent::Kind::kJoin ? e.count : -e.count;
    require(size >= 1 && size <= env.max_swarm,
            "tasks.events drive the swarm size outside [1, env.max_swarm]");
  }
}

ExperimentConfig config_from_json(const json& resolved) {
  ExperimentConfig c;
  try {
    c.scenario = resolved.at("scenario").get<std::string>();
    c.algorithm = algorithm_from_string(resolved.at("algorithm").get<std::string>());
    c.episodes = resolved.at("episodes").get<int>();
    c.seeds = resolved.at("seeds").get<std::vector<std::uint64_t>>();
    c.output_dir = resolved.at("output_dir").get<std::string>();
    c.single_thread = resolved.at("single_thread").get<bool>();
    c.baseline_episodes = resolved.at("baseline_episodes").get<int>();

    const json& link = resolved.at("link");
    c.env.radio = parse_radio(resolved.at("radio"));
    c.env.link = parse_link(link, c.env.radio);
    c.altitude_form = altitude_form(link.at("altitude_bound_form").get<std::string>());
    c.env.mission = parse_mission(resolved.at("mission"));
    c.agent = parse_agent(resolved.at("agent"));

    const json& env = resolved.at("env");
    c.env.max_swarm = env.at("max_swarm").get<int>();
    c.env.lambda_energy = env.at("lambda_energy").get<double>();
    c.env.terminal_on_violation = env.at("terminal_on_violation").get<bool>();

    const json& tasks = resolved.at("tasks");
    c.env.family.min_swarm = tasks.at("min_swarm").get<int>();
    c.env.family.max_swarm = tasks.at("max_swarm").get<int>();
    c.env.num_strategic = tasks.at("num_strategic").get<int>();
    c.env.initial_demand = tasks.at("demand").get<double>();
    for (const auto& e : tasks.at("events")) c.events.push_back(parse_event(e));

    const json& task = resolved.at("task");
    c.task.swarm_size = task.at("swarm_size").get<int>();
    c.task.strategic_cells = task.at("strategic_cells").get<std::vector<int>>();
    c.task.device_seed = task.at("device_seed").get<std::uint64_t>();
    c.task.start_cells = task.at("start_cells").get<std::vector<int>>();

    const json& layout_file = resolved.at("mission").at("layout_file");
    if (!layout_file.is_null()) {
      const WorldLayout layout = read_layout_file(layout_file.get<std::string>());
      c.env.mission.area_m = layout.area_m;
      c.env.mission.cells_per_side = layout.cells_per_side;
      c.env.devices = layout.devices;
      if (!layout.strategic_cells.empty()) {
        c.task.strategic_cells = layout.strategic_cells;
        c.env.num_strategic = static_cast<int>(layout.strategic_cells.size());
      }
    }
    if (tasks.at("fixed_strategic").get<bool>()) {
      c.env.family.fixed_strategic_cells = c.task.strategic_cells;
    }
    c.task.initial_demands.assign(c.task.strategic_cells.size(), c.env.initial_demand);
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  c.resolved = resolved;
  return c;
}

ExperimentConfig resolve_config(const json& document, const std::map<std::string, std::string>& env) {
  require(document.is_object() || document.is_null(), "config document must be a JSON object");
  // The scenario name selects the preset layer, so resolve it first.
  json probe = json{{"scenario", "default"}};
  if (document.is_object() && document.contains("scenario")) probe["scenario"] = document["scenario"];
  for (const auto& [name, value] : env) {
    if (lower(name) == "uavswarm_scenario") probe["scenario"] = value;
  }
  require(probe["scenario"].is_string(), "scenario must be a string");

  json resolved = default_config_json();
  merge_known_keys(resolved, scenario_preset(probe["scenario"].get<std::string>()));
  if (document.is_object()) merge_known_keys(resolved, document);
  apply_env_overrides(resolved, env);
  return config_from_json(resolved);
}

ExperimentConfig load_config(const std::string& path, const std::map<std::string, std::string>& env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char ch) { return std::isspace(ch) != 0; });
  json document = json::object();
  if (!blank) {
    document = json::parse(text, nullptr, false);
    if (document.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
  }
  return resolve_config(document, env);
}

ExactInstance instance_from_json(const json& j) {
  static const std::vector<std::string> kKeys = {
      "area_m",         "cells_per_side",  "strategic_cells", "devices",
      "uav_start_cells", "horizon",        "rate_floor_bps",  "t_max_seconds",
      "altitude_bound_m", "strict_coverage", "budget",        "devices_per_cell",
      "layout_seed",    "mission",         "link",            "radio"};
  require(j.is_object(), "instance must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    require(std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end(),
            "unknown instance key: " + key);
  }

  json base = default_config_json();
  if (j.contains("mission")) merge_known_keys(base["mission"], j["mission"], "mission");
  if (j.contains("link")) merge_known_keys(base["link"], j["link"], "link");
  if (j.contains("radio")) merge_known_keys(base["radio"], j["radio"], "radio");

  ExactInstance inst;
  try {
    inst.radio = parse_radio(base["radio"]);
    inst.link = parse_link(base["link"], inst.radio);
    inst.mission = parse_mission(base["mission"]);
    inst.mission.area_m = j.value("area_m", inst.mission.area_m);
    inst.mission.cells_per_side = j.value("cells_per_side", inst.mission.cells_per_side);
    inst.mission.devices_per_cell = j.value("devices_per_cell", inst.mission.devices_per_cell);
    if (j.contains("t_max_seconds")) inst.mission.t_max_seconds = j["t_max_seconds"].get<double>();
    if (j.contains("rate_floor_bps")) inst.radio.rate_floor_bps = j["rate_floor_bps"].get<double>();
    inst.strategic_cells = j.value("strategic_cells", std::vector<int>{});
    inst.start_cells = j.at("uav_start_cells").get<std::vector<int>>();
    inst.horizon = j.at("horizon").get<int>();
    if (j.contains("altitude_bound_m")) inst.altitude_bound_m = j["altitude_bound_m"].get<double>();
    inst.strict_coverage = j.value("strict_coverage", false);
    inst.budget = j.value("budget", inst.budget);
    if (j.contains("devices")) {
      inst.devices = parse_devices(j["devices"]);
    } else {
      inst.devices = default_device_layout(inst.mission, j.value("layout_seed", std::uint64_t{7}),
                                           inst.radio.device_tx_watts);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed instance: ") + e.what());
  }
  validated("instance", [&] { inst.validate(); });
  return inst;
}

ExactInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file: " + path);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("instance file is not valid JSON: " + path);
  return instance_from_json(j);
}

}  // namespace uavswarm
