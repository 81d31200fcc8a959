#include "uavswarm/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <stdexcept>

#include "uavswarm/actor_critic.hpp"
#include "uavswarm/dqn.hpp"
#include "uavswarm/meta.hpp"
#include "uavswarm/ppo.hpp"

namespace uavswarm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(episode) + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::span<const EpisodeMetrics> tail_rows(const SeedResult& r) {
  // Tail statistics refer to the final phase only.
  if (r.phases.empty()) return r.episodes;
  const auto& last = r.phases.back();
  return std::span<const EpisodeMetrics>(r.episodes).subspan(
      static_cast<std::size_t>(last.first_episode), static_cast<std::size_t>(last.episode_count));
}

template <typename F>
double tail_field(const SeedResult& r, F&& field) {
  const auto rows = tail_rows(r);
  std::vector<double> values;
  for (const auto& m : rows) values.push_back(field(m));
  return tail_mean(values, 0.1);
}

class OutputTracker {
 public:
  explicit OutputTracker(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
  }
  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written_.push_back(path);
    return out;
  }
  void rollback() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_dir_) fs::remove(dir_, ec);
  }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  std::vector<fs::path> written_;
};

}  // namespace

double SeedResult::final_satisfaction() const {
  return tail_field(*this, [](const EpisodeMetrics& m) { return m.satisfaction; });
}
double SeedResult::strategic_energy_j() const {
  return tail_field(*this, [](const EpisodeMetrics& m) { return m.strategic_energy_j; });
}
double SeedResult::non_strategic_energy_j() const {
  return tail_field(*this, [](const EpisodeMetrics& m) { return m.non_strategic_energy_j; });
}
VisitRatio SeedResult::visits() const { return visit_ratio(tail_rows(*this)); }

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::mt19937_64& rng,
                                      const PolicyParams* meta_init) {
  const int dim = state_dimension(config.env);
  switch (config.algorithm) {
    case Algorithm::kMetaRl:
      if (meta_init == nullptr) throw std::invalid_argument("meta_rl needs meta-trained parameters");
      return std::make_unique<ActorCriticLearner>(*meta_init, config.agent);
    case Algorithm::kActorCritic:
      return std::make_unique<ActorCriticLearner>(
          make_policy(dim, config.env.max_swarm, config.agent.hidden, &rng), config.agent);
    case Algorithm::kPpo:
      return std::make_unique<PpoLearner>(
          make_policy(dim, config.env.max_swarm, config.agent.hidden, &rng), config.agent);
    case Algorithm::kDqn: {
      std::vector<int> sizes{dim};
      sizes.insert(sizes.end(), config.agent.hidden.begin(), config.agent.hidden.end());
      sizes.push_back(config.env.max_swarm * kNumActions);
      Mlp q(sizes);
      q.init_random(rng, 0.1);
      return std::make_unique<DqnLearner>(std::move(q), config.agent);
    }
    case Algorithm::kRandom:
      return std::make_unique<RandomLearner>();
  }
  throw std::invalid_argument("unhandled algorithm");
}

double random_policy_reward(const Environment& env, int episodes, std::uint64_t seed) {
  Environment copy = env;
  RandomLearner random;
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    copy.reset(episode_seed(seed, e));
    total += random.run_episode(copy, 1.0, rng, false).reward;
  }
  return total / episodes;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;
  std::mt19937_64 rng(seed);

  std::optional<MetaState> meta;
  if (config.algorithm == Algorithm::kMetaRl) {
    meta.emplace();
    meta->meta = make_policy(state_dimension(config.env), config.env.max_swarm,
                             config.agent.hidden, &rng);
    meta->inner_steps = config.agent.meta_inner_steps;
    meta->inner_learning_rate = config.agent.learning_rate;
    meta->outer_rate = config.agent.meta_outer_rate;
    Environment meta_env(config.env);
    result.meta_episodes =
        meta_train(*meta, meta_env, config.agent, config.agent.meta_iterations, rng).episodes;
  }

  auto learner = make_learner(config, rng, meta ? &meta->meta : nullptr);
  auto* actor_critic = dynamic_cast<ActorCriticLearner*>(learner.get());

  Environment env(config.env);
  env.reset(config.task, episode_seed(seed, -1));
  std::size_t next_event = 0;
  auto start_phase = [&](int episode) {
    PhaseSummary phase;
    phase.first_episode = episode;
    phase.swarm_size = env.active_count();
    phase.random_reward = random_policy_reward(env, config.baseline_episodes,
                                               episode_seed(seed ^ 0x5bd1e995ULL, episode));
    result.phases.push_back(phase);
  };
  start_phase(0);

  for (int e = 0; e < config.episodes; ++e) {
    bool changed = false;
    while (next_event < config.events.size() && config.events[next_event].episode == e) {
      auto event = config.events[next_event++];
      // The environment counts the reset above as one started episode.
      event.episode = env.episodes_started();
      env.apply_swarm_event(event);
      changed = true;
    }
    if (changed) {
      if (meta && actor_critic != nullptr) actor_critic->reset_params(meta->meta);
      start_phase(e);
    }
    env.reset(episode_seed(seed, e));
    learner->run_episode(env, epsilon_schedule(config.agent, e, config.episodes), rng, true);
    result.episodes.push_back(metrics_from_summary(e, env.summary(), env.task().strategic_cells));
  }

  for (std::size_t p = 0; p < result.phases.size(); ++p) {
    auto& phase = result.phases[p];
    const int end = p + 1 < result.phases.size() ? result.phases[p + 1].first_episode
                                                 : config.episodes;
    phase.episode_count = end - phase.first_episode;
    std::vector<double> rewards;
    for (int e = phase.first_episode; e < end; ++e) rewards.push_back(result.episodes[e].reward);
    phase.plateau_reward = tail_mean(rewards, 0.1);
    phase.episodes_to_converge = episodes_to_converge(rewards, phase.random_reward);
  }
  return result;
}

json summary_json(const ExperimentResult& result) {
  json seeds = json::array();
  for (const auto& r : result.seeds) {
    json phases = json::array();
    for (const auto& p : r.phases) {
      phases.push_back({{"first_episode", p.first_episode},
                        {"episodes", p.episode_count},
                        {"swarm_size", p.swarm_size},
                        {"random_reward", p.random_reward},
                        {"plateau_reward", p.plateau_reward},
                        {"episodes_to_converge", p.episodes_to_converge}});
    }
    const auto v = r.visits();
    seeds.push_back({{"seed", r.seed},
                     {"meta_episodes", r.meta_episodes},
                     {"final_satisfaction", r.final_satisfaction()},
                     {"strategic_energy_j", r.strategic_energy_j()},
                     {"non_strategic_energy_j", r.non_strategic_energy_j()},
                     {"strategic_visit_mean", v.strategic_mean},
                     {"non_strategic_visit_mean", v.non_strategic_mean},
                     {"phases", phases}});
  }
  return {{"scenario", result.config.scenario},
          {"algorithm", to_string(result.config.algorithm)},
          {"episodes", result.config.episodes},
          {"seeds", seeds}};
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  if (config.single_thread || config.seeds.size() == 1) {
    for (auto s : config.seeds) result.seeds.push_back(run_seed(config, s));
  } else {
    std::vector<std::future<SeedResult>> futures;
    for (auto s : config.seeds) {
      futures.push_back(std::async(std::launch::async, [&config, s] { return run_seed(config, s); }));
    }
    for (auto& f : futures) result.seeds.push_back(f.get());
  }
  if (!write_files) return result;

  OutputTracker out(config.output_dir);
  try {
    json resolved = config.resolved.is_null() ? json::object() : config.resolved;
    resolved["seeds"] = config.seeds;
    out.open("config.json") << resolved.dump(2) << '\n';
    for (const auto& r : result.seeds) {
      const std::string tag = std::to_string(r.seed);
      {
        auto f = out.open("metrics_seed_" + tag + ".csv");
        write_metrics_csv(f, r.episodes);
      }
      {
        auto f = out.open("heatmap_seed_" + tag + ".csv");
        emit_plot_data(tail_rows(r), PlotKind::kHeatmap, f);
      }
    }
    out.open("summary.json") << summary_json(result).dump(2) << '\n';
  } catch (...) {
    out.rollback();
    throw;
  }
  return result;
}

Spread spread(std::span<const double> values) {
  Spread s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

std::vector<ComparisonRow> compare_results(std::span<const ExperimentResult> results) {
  if (results.size() < 2) throw std::invalid_argument("compare needs at least two configs");
  for (const auto& r : results) {
    if (r.config.scenario != results.front().config.scenario) {
      throw std::invalid_argument("compare needs configs with the same scenario (\"" +
                                  results.front().config.scenario + "\" vs \"" +
                                  r.config.scenario + "\")");
    }
    if (r.config.seeds != results.front().config.seeds) {
      throw std::invalid_argument("compare needs configs with the same seeds");
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& r : results) {
    std::vector<double> conv, sat, es, en;
    for (const auto& s : r.seeds) {
      conv.push_back(s.phases.empty() ? 0.0 : s.phases.front().episodes_to_converge);
      sat.push_back(s.final_satisfaction());
      es.push_back(s.strategic_energy_j());
      en.push_back(s.non_strategic_energy_j());
    }
    rows.push_back({to_string(r.config.algorithm), spread(conv), spread(sat), spread(es), spread(en)});
  }
  return rows;
}

std::vector<ComparisonRow> compare_algorithms(std::span<const ExperimentConfig> configs) {
  if (configs.size() < 2) throw std::invalid_argument("compare needs at least two configs");
  for (const auto& c : configs) {
    if (c.scenario != configs.front().scenario) {
      throw std::invalid_argument("compare needs configs with the same scenario (\"" +
                                  configs.front().scenario + "\" vs \"" + c.scenario + "\")");
    }
  }
  std::vector<ExperimentResult> results;
  for (const auto& c : configs) results.push_back(run_experiment(c, false));
  return compare_results(results);
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "algorithm,episodes_to_converge_mean,episodes_to_converge_std,final_satisfaction_mean,"
         "final_satisfaction_std,strategic_energy_j_mean,strategic_energy_j_std,"
         "non_strategic_energy_j_mean,non_strategic_energy_j_std\n";
  for (const auto& r : rows) {
    out << r.algorithm;
    for (const Spread& s : {r.episodes_to_converge, r.final_satisfaction, r.strategic_energy_j,
                            r.non_strategic_energy_j}) {
      out << ',' << format_number(s.mean) << ',' << format_number(s.stddev);
    }
    out << '\n';
  }
}

}  // namespace uavswarm
