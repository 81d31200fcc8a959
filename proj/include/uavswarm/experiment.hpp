#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavswarm/config.hpp"
#include "uavswarm/metrics.hpp"

namespace uavswarm {

/// Stretch of episodes with a constant swarm, delimited by swarm events.
struct PhaseSummary {
  int first_episode = 0;
  int episode_count = 0;
  int swarm_size = 0;
  double random_reward = 0.0;   // floor for the convergence measure
  double plateau_reward = 0.0;  // tail mean of the phase
  int episodes_to_converge = 0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeMetrics> episodes;
  std::vector<PhaseSummary> phases;
  int meta_episodes = 0;

  double final_satisfaction() const;
  double strategic_energy_j() const;      // tail mean
  double non_strategic_energy_j() const;  // tail mean
  VisitRatio visits() const;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;
};

/// Builds the learner for the configured algorithm. Meta-RL is handed the
/// already meta-trained parameters.
std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::mt19937_64& rng,
                                      const PolicyParams* meta_init = nullptr);

/// Mean episode reward of the uniform random policy on the environment's
/// current task, on a private copy of the environment.
double random_policy_reward(const Environment& env, int episodes, std::uint64_t seed);

/// Trains and evaluates one seed end to end, without touching the disk.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every seed (in parallel unless single_thread) and, when write_files
/// is set, writes config.json, metrics_seed_<s>.csv, heatmap_seed_<s>.csv
/// and summary.json into config.output_dir. Files written before a failure
/// are removed.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

nlohmann::json summary_json(const ExperimentResult& result);

struct Spread {
  double mean = 0.0;
  double stddev = 0.0;
};
Spread spread(std::span<const double> values);

struct ComparisonRow {
  std::string algorithm;
  Spread episodes_to_converge;
  Spread final_satisfaction;
  Spread strategic_energy_j;
  Spread non_strategic_energy_j;
};

/// Needs at least two results from configs with the same scenario and
/// seeds. Convergence uses the first phase of each seed.
std::vector<ComparisonRow> compare_results(std::span<const ExperimentResult> results);
std::vector<ComparisonRow> compare_algorithms(std::span<const ExperimentConfig> configs);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace uavswarm
