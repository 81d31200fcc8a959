#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavswarm/config.hpp"
#include "uavswarm/experiment.hpp"
#include "uavswarm/metrics.hpp"

using namespace uavswarm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json tiny(const std::string& algorithm, int episodes) {
  return json{{"algorithm", algorithm},
              {"episodes", episodes},
              {"seeds", {3, 4}},
              {"single_thread", true},
              {"baseline_episodes", 2},
              {"agent",
               {{"hidden", {8}},
                {"minibatch", 8},
                {"meta_iterations", 2},
                {"meta_inner_steps", 1},
                {"meta_tasks_per_iteration", 2}}}};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(RunExperiment, SwarmEventsAppearInMetrics) {
  auto doc = tiny("actor_critic", 30);
  doc["scenario"] = "fig3";
  doc["seeds"] = {1};
  doc["tasks"] = {{"events",
                   {{{"episode", 10}, {"kind", "join"}, {"count", 1}},
                    {{"episode", 20}, {"kind", "leave"}, {"count", 2}}}}};
  auto config = resolve_config(doc);
  config.output_dir = fresh_dir("uavswarm_fig3").string();
  const auto result = run_experiment(config);
  const auto rows = read_metrics_file((fs::path(config.output_dir) / "metrics_seed_1.csv").string());
  ASSERT_EQ(rows.size(), 30u);
  for (const auto& r : rows) {
    const int expected = r.episode < 10 ? 4 : (r.episode < 20 ? 5 : 3);
    EXPECT_EQ(r.swarm_size, expected) << "episode " << r.episode;
  }
  ASSERT_EQ(result.seeds[0].phases.size(), 3u);
  EXPECT_EQ(result.seeds[0].phases[1].first_episode, 10);
  EXPECT_EQ(result.seeds[0].phases[2].swarm_size, 3);
}

TEST(RunExperiment, OutputFilesAndHeatmap) {
  auto config = resolve_config(tiny("random", 6));
  config.scenario = "fig2";
  config.output_dir = fresh_dir("uavswarm_fig2").string();
  run_experiment(config);
  const fs::path dir(config.output_dir);
  for (const char* f : {"config.json", "summary.json", "metrics_seed_3.csv", "metrics_seed_4.csv",
                        "heatmap_seed_3.csv", "heatmap_seed_4.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto heat = lines_of(slurp(dir / "heatmap_seed_3.csv"));
  ASSERT_EQ(heat.size(), 26u);
  EXPECT_EQ(heat[0], "cell_x,cell_y,visits,is_strategic");

  const auto echoed = json::parse(slurp(dir / "config.json"));
  EXPECT_EQ(echoed["seeds"], json({3, 4}));
  // The echoed config reproduces the run.
  EXPECT_NO_THROW(resolve_config(echoed));
}

TEST(RunExperiment, MetricsInvariants) {
  const auto config = resolve_config(tiny("ppo", 8));
  const auto seed = run_seed(config, 9);
  ASSERT_EQ(seed.episodes.size(), 8u);
  for (const auto& r : seed.episodes) {
    EXPECT_GE(r.satisfaction, 0.0);
    EXPECT_LE(r.satisfaction, 1.0);
    EXPECT_LE(r.masked_energy_j, r.unmasked_energy_j() * (1.0 + 1e-12));
    int visits = 0;
    for (int v : r.visits) visits += v;
    EXPECT_EQ(visits, r.swarm_size * r.steps);
  }
}

TEST(RunExperiment, SameSeedIsByteIdentical) {
  for (const char* algo : {"meta_rl", "dqn"}) {
    auto a = resolve_config(tiny(algo, 6));
    auto b = a;
    a.output_dir = fresh_dir("uavswarm_rep_a").string();
    b.output_dir = fresh_dir("uavswarm_rep_b").string();
    b.single_thread = false;
    run_experiment(a);
    run_experiment(b);
    for (const char* f : {"metrics_seed_3.csv", "metrics_seed_4.csv", "heatmap_seed_4.csv", "summary.json"}) {
      EXPECT_EQ(slurp(fs::path(a.output_dir) / f), slurp(fs::path(b.output_dir) / f)) << algo << " " << f;
    }
  }
}

TEST(RunExperiment, FailureRemovesPartialOutput) {
  auto config = resolve_config(tiny("random", 4));
  const auto dir = fresh_dir("uavswarm_partial");
  fs::create_directories(dir);
  std::ofstream(dir / "keep.txt") << "x";
  // A directory squatting on a file name makes the late writes fail.
  fs::create_directories(dir / "summary.json");
  config.output_dir = dir.string();
  EXPECT_ANY_THROW(run_experiment(config));
  EXPECT_FALSE(fs::exists(dir / "metrics_seed_3.csv"));
  EXPECT_FALSE(fs::exists(dir / "config.json"));
  EXPECT_TRUE(fs::exists(dir / "keep.txt"));
}

TEST(Compare, NeedsTwoMatchingConfigs) {
  const auto a = resolve_config(tiny("random", 4));
  EXPECT_THROW(compare_algorithms(std::vector<ExperimentConfig>{a}), std::invalid_argument);
  auto b = a;
  b.scenario = "fig3";
  EXPECT_THROW(compare_algorithms(std::vector<ExperimentConfig>{a, b}), std::invalid_argument);
  auto c = a;
  c.seeds = {7};
  EXPECT_THROW(compare_algorithms(std::vector<ExperimentConfig>{a, c}), std::invalid_argument);
}

TEST(Compare, IdenticalConfigsGiveIdenticalRows) {
  const auto a = resolve_config(tiny("actor_critic", 6));
  const auto rows = compare_algorithms(std::vector<ExperimentConfig>{a, a});
  ASSERT_EQ(rows.size(), 2u);
  std::ostringstream one, two;
  write_comparison_csv(one, std::span(rows).subspan(0, 1));
  write_comparison_csv(two, std::span(rows).subspan(1, 1));
  EXPECT_EQ(one.str(), two.str());
  EXPECT_EQ(rows[0].algorithm, "actor_critic");
}

TEST(Emit, KindsAndSchemas) {
  const auto config = resolve_config(tiny("random", 7));
  const auto rows = run_seed(config, 2).episodes;
  std::ostringstream heat, curve, energy, sat;
  emit_plot_data(rows, plot_kind_from_string("heatmap"), heat);
  emit_plot_data(rows, plot_kind_from_string("learning_curve"), curve);
  emit_plot_data(rows, plot_kind_from_string("energy_bars"), energy);
  emit_plot_data(rows, plot_kind_from_string("satisfaction_bars"), sat);
  EXPECT_EQ(lines_of(heat.str()).size(), 26u);
  const auto c = lines_of(curve.str());
  ASSERT_EQ(c.size(), 8u);
  EXPECT_NE(c[0].find("reward"), std::string::npos);
  EXPECT_EQ(lines_of(energy.str()).size(), 2u);
  EXPECT_EQ(lines_of(sat.str()).size(), 2u);
  EXPECT_THROW(plot_kind_from_string("pie"), std::invalid_argument);
}

TEST(Metrics, CsvRoundTrip) {
  const auto config = resolve_config(tiny("random", 3));
  const auto rows = run_seed(config, 5).episodes;
  std::stringstream buf;
  write_metrics_csv(buf, rows);
  std::stringstream again;
  write_metrics_csv(again, read_metrics_csv(buf));
  EXPECT_EQ(buf.str(), again.str());
  EXPECT_EQ(lines_of(buf.str())[0], kMetricsHeader);
}

TEST(Metrics, ConvergenceMeasure) {
  std::vector<double> rewards(200, 0.0);
  for (int i = 100; i < 200; ++i) rewards[static_cast<std::size_t>(i)] = 10.0;
  // MA50 crosses 9 when 45 of the last 50 episodes sit at the plateau.
  EXPECT_EQ(episodes_to_converge(rewards, 0.0), 145);
  const std::vector<double> flat(100, 3.0);
  EXPECT_EQ(episodes_to_converge(flat, 3.0), 50);
  EXPECT_EQ(episodes_to_converge(std::vector<double>(20, 3.0), 3.0), 20);

  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(moving_average(v, 2), (std::vector<double>{1, 1.5, 2.5, 3.5}));
  EXPECT_DOUBLE_EQ(tail_mean(v, 0.5), 3.5);
  EXPECT_DOUBLE_EQ(spread(std::vector<double>{1.0, 3.0}).mean, 2.0);
}
