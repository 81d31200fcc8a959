#pragma once

// Experiment configuration: Table-1 defaults, named scenario presets, the
// JSON config file, UAVSWARM_* environment overrides, and validation.
//
// Resolution order (later wins): built-in defaults, scenario preset, config
// file, environment variables, command-line flags. Unknown keys are
// rejected at every layer.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavswarm/agent.hpp"
#include "uavswarm/env.hpp"
#include "uavswarm/oracle.hpp"

namespace uavswarm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { kMetaRl, kActorCritic, kDqn, kPpo, kRandom };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algorithm);

struct ExperimentConfig {
  std::string scenario = "default";
  Algorithm algorithm = Algorithm::kMetaRl;
  int episodes = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  bool single_thread = false;

  EnvConfig env;
  AgentConfig agent;
  AltitudeBoundForm altitude_form = AltitudeBoundForm::kSquareRoot;

  // The evaluation task before any swarm event.
  TaskSpec task;
  std::vector<SwarmEvent> events;
  // Episodes of the random policy used as the reward floor when measuring
  // convergence.
  int baseline_episodes = 50;

  // Fully resolved configuration as written to the output directory.
  nlohmann::json resolved;

  void validate() const;
};

/// Every recognised key with its default value.
nlohmann::json default_config_json();

/// Preset overlay for a named scenario ("default", "fig2", "fig3", "fig4").
/// Throws ConfigError for an unknown name.
nlohmann::json scenario_preset(const std::string& name);

/// Recursively merges `overlay` into `base`; a key absent from `base` is a
/// ConfigError naming its dotted path.
void merge_known_keys(nlohmann::json& base, const nlohmann::json& overlay, const std::string& path = "");

/// Applies UAVSWARM_<SECTION>__<KEY>=<json-or-string> overrides.
void apply_env_overrides(nlohmann::json& config, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> uavswarm_environment();

/// Builds and validates the typed configuration from a resolved document.
ExperimentConfig config_from_json(const nlohmann::json& resolved);

/// Defaults <- scenario preset <- document <- environment overrides.
ExperimentConfig resolve_config(const nlohmann::json& document,
                                const std::map<std::string, std::string>& env = {});

/// Reads a JSON file (an empty file means "all defaults") and resolves it.
ExperimentConfig load_config(const std::string& path,
                             const std::map<std::string, std::string>& env = uavswarm_environment());

/// Oracle instance file: layout keys plus uav_start_cells, horizon and
/// optional rate_floor_bps, t_max_seconds, altitude_bound_m,
/// strict_coverage, budget, devices_per_cell, layout_seed, and "mission" /
/// "link" / "radio" override blocks.
ExactInstance load_instance(const std::string& path);
ExactInstance instance_from_json(const nlohmann::json& j);

}  // namespace uavswarm
