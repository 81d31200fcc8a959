// uavswarm: run, compare, oracle and emit subcommands.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavswarm/config.hpp"
#include "uavswarm/experiment.hpp"
#include "uavswarm/metrics.hpp"
#include "uavswarm/oracle.hpp"

namespace {

using namespace uavswarm;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::string> algo;
  std::optional<std::string> out;
  bool single_thread = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--episodes", f.episodes, "Episodes per seed");
  cmd->add_option("--algo", f.algo, "meta_rl, actor_critic, dqn, ppo or random");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--single-thread", f.single_thread, "Run seeds sequentially");
}

ExperimentConfig load_with_flags(const std::string& path, const CommonFlags& f) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::object();
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
  }
  if (f.seed) doc["seeds"] = {*f.seed};
  if (f.episodes) doc["episodes"] = *f.episodes;
  if (f.algo) doc["algorithm"] = *f.algo;
  if (f.out) doc["output_dir"] = *f.out;
  if (f.single_thread) doc["single_thread"] = true;
  auto env = uavswarm_environment();
  // Flags beat environment overrides for the keys they cover.
  if (f.seed) env.erase("UAVSWARM_SEEDS");
  if (f.episodes) env.erase("UAVSWARM_EPISODES");
  if (f.algo) env.erase("UAVSWARM_ALGORITHM");
  if (f.out) env.erase("UAVSWARM_OUTPUT_DIR");
  if (f.single_thread) env.erase("UAVSWARM_SINGLE_THREAD");
  return resolve_config(doc, env);
}

void print_trajectory(const Trajectory& t) {
  for (std::size_t u = 0; u < t.size(); ++u) {
    std::cout << "uav " << u << ":";
    for (int c : t[u]) std::cout << ' ' << c;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV swarm IoT data-collection simulator and learners"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_config;
  auto* run = app.add_subcommand("run", "Train and evaluate one configuration");
  run->add_option("config", run_config, "JSON config file")->required();
  add_common(run, run_flags);

  CommonFlags cmp_flags;
  std::vector<std::string> cmp_configs;
  auto* compare = app.add_subcommand("compare", "Compare algorithms on one scenario");
  compare->add_option("configs", cmp_configs, "Two or more JSON config files")->required();
  add_common(compare, cmp_flags);

  std::string instance_path;
  auto* oracle = app.add_subcommand("oracle", "Exact minimum-energy trajectory of a small instance");
  oracle->add_option("instance", instance_path, "JSON instance file")->required();

  std::string metrics_path, kind, emit_out;
  auto* emit = app.add_subcommand("emit", "Convert a metrics file into plot data");
  emit->add_option("metrics", metrics_path, "metrics_seed_<s>.csv file")->required();
  emit->add_option("--kind", kind, "heatmap, learning_curve, energy_bars or satisfaction_bars")
      ->required();
  emit->add_option("--out", emit_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = load_with_flags(run_config, run_flags);
      const auto result = run_experiment(config);
      for (const auto& s : result.seeds) {
        const auto v = s.visits();
        std::printf("seed %llu: satisfaction %.3f  strategic/other visits %.2f/%.2f  converged after %d episodes\n",
                    static_cast<unsigned long long>(s.seed), s.final_satisfaction(),
                    v.strategic_mean, v.non_strategic_mean,
                    s.phases.empty() ? 0 : s.phases.back().episodes_to_converge);
      }
      std::printf("wrote %s\n", config.output_dir.c_str());
    } else if (*compare) {
      std::vector<ExperimentConfig> configs;
      for (const auto& p : cmp_configs) configs.push_back(load_with_flags(p, cmp_flags));
      const auto rows = compare_algorithms(configs);
      if (cmp_flags.out) {
        std::filesystem::create_directories(*cmp_flags.out);
        std::ofstream f(std::filesystem::path(*cmp_flags.out) / "comparison.csv");
        write_comparison_csv(f, rows);
      }
      write_comparison_csv(std::cout, rows);
    } else if (*oracle) {
      const auto inst = load_instance(instance_path);
      const auto sol = enumerate_optimum(inst);
      std::printf("enumerated %llu trajectories, %llu feasible\n",
                  static_cast<unsigned long long>(sol.enumerated),
                  static_cast<unsigned long long>(sol.feasible_count));
      if (!sol.feasible) {
        std::printf("no feasible trajectory\n");
        return 2;
      }
      std::printf("objective_j %.6f\nunmasked_energy_j %.6f\n", sol.objective_j, sol.unmasked_energy_j);
      print_trajectory(sol.trajectory);
    } else if (*emit) {
      const auto rows = read_metrics_file(metrics_path);
      const auto k = plot_kind_from_string(kind);
      if (emit_out.empty()) {
        emit_plot_data(rows, k, std::cout);
      } else {
        std::ofstream f(emit_out);
        if (!f) throw std::runtime_error("cannot write " + emit_out);
        emit_plot_data(rows, k, f);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
