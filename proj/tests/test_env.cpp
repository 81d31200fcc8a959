#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "uavswarm/env.hpp"

using namespace uavswarm;

namespace {

constexpr int N = static_cast<int>(Action::kNorth);
constexpr int S = static_cast<int>(Action::kSouth);
constexpr int E = static_cast<int>(Action::kEast);
constexpr int W = static_cast<int>(Action::kWest);
constexpr int H = static_cast<int>(Action::kHover);

TaskSpec task_with(int swarm, std::vector<int> starts) {
  TaskSpec t;
  t.swarm_size = swarm;
  t.strategic_cells = {6, 13, 22};
  t.device_seed = 7;
  t.start_cells = std::move(starts);
  return t;
}

std::vector<int> actions(std::initializer_list<int> head, int max_swarm = 7) {
  std::vector<int> a(head);
  a.resize(static_cast<std::size_t>(max_swarm), H);
  return a;
}

}  // namespace

TEST(ApplyAction, GridMovesAndBorders) {
  EXPECT_EQ(apply_action(12, Action::kNorth, 5), 17);
  EXPECT_EQ(apply_action(12, Action::kSouth, 5), 7);
  EXPECT_EQ(apply_action(12, Action::kEast, 5), 13);
  EXPECT_EQ(apply_action(12, Action::kWest, 5), 11);
  EXPECT_EQ(apply_action(12, Action::kHover, 5), 12);
  EXPECT_EQ(apply_action(0, Action::kSouth, 5), 0);
  EXPECT_EQ(apply_action(4, Action::kEast, 5), 4);
  EXPECT_EQ(apply_action(20, Action::kNorth, 5), 20);
  EXPECT_EQ(apply_action(5, Action::kWest, 5), 5);
}

TEST(StrategicReward, Examples) {
  EXPECT_EQ(strategic_reward(0), 1.0);
  EXPECT_EQ(strategic_reward(1), 0.5);
  EXPECT_EQ(strategic_reward(3), 0.25);
  EXPECT_THROW(strategic_reward(-1), std::invalid_argument);
}

TEST(StateDimension, DefaultsGive279) {
  EnvConfig cfg;
  EXPECT_EQ(state_dimension(cfg), 25 * 7 + 26 * 3 + 25 + 1);
  EXPECT_EQ(state_dimension(cfg), 279);
  Environment env(cfg);
  const auto s = env.reset(task_with(4, {}), 1);
  EXPECT_EQ(s.features.size(), 279u);
}

TEST(Reset, DistinctDeterministicStarts) {
  Environment env(EnvConfig{});
  env.reset(task_with(4, {}), 42);
  std::vector<int> a;
  for (const auto& u : env.world().uavs()) if (u.active) a.push_back(u.cell);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(std::set<int>(a.begin(), a.end()).size(), 4u);
  env.reset(task_with(4, {}), 42);
  std::vector<int> b;
  for (const auto& u : env.world().uavs()) if (u.active) b.push_back(u.cell);
  EXPECT_EQ(a, b);
  for (const auto& s : env.world().strategic()) EXPECT_EQ(s.demand, s.initial_demand);
}

TEST(Reset, MoreUavsThanCellsIsError) {
  EnvConfig cfg;
  cfg.mission.cells_per_side = 1;
  cfg.mission.area_m = 88.0;
  cfg.num_strategic = 0;
  Environment env(cfg);
  TaskSpec t;
  t.swarm_size = 2;
  EXPECT_THROW(env.reset(t, 1), std::invalid_argument);
}

TEST(Reset, FreshEncodingHasEmptyVisitBitmap) {
  EnvConfig cfg;
  Environment env(cfg);
  const auto s = env.reset(task_with(4, {0, 1, 2, 3}), 1);
  const std::size_t visited_offset = 25 * 7 + 26 * 3;
  for (std::size_t i = 0; i < 25; ++i) EXPECT_EQ(s.features[visited_offset + i], 0.0);
  EXPECT_EQ(s.features.back(), 4.0 / 7.0);
  for (double f : s.features) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
  EXPECT_EQ(s, env.encode_state());
}

TEST(Step, CollisionCancelsMovesAndPenalisesBoth) {
  EnvConfig cfg;
  cfg.lambda_energy = 0.0;
  Environment env(cfg);
  // UAV 0 at cell 0 moves east, UAV 1 at cell 2 moves west: both target 1.
  env.reset(task_with(2, {0, 2}), 1);
  const auto out = env.step(actions({E, W}));
  EXPECT_EQ(out.info.collisions, 2);
  EXPECT_EQ(out.reward, -2.0);
  EXPECT_EQ(env.world().uavs()[0].cell, 0);
  EXPECT_EQ(env.world().uavs()[1].cell, 2);
}

TEST(Step, CancelledMoveCanCascade) {
  EnvConfig cfg;
  cfg.lambda_energy = 0.0;
  Environment env(cfg);
  // 0 and 2 collide on 1; 2 falls back to its origin, which 3 was entering.
  env.reset(task_with(3, {0, 2, 3}), 1);
  const auto out = env.step(actions({E, W, W}));
  EXPECT_EQ(out.info.collisions, 3);
  EXPECT_EQ(env.world().uavs()[0].cell, 0);
  EXPECT_EQ(env.world().uavs()[1].cell, 2);
  EXPECT_EQ(env.world().uavs()[2].cell, 3);
}

TEST(Step, SingleHoverOnPlainCell) {
  EnvConfig cfg;
  Environment env(cfg);
  env.reset(task_with(1, {0}), 1);
  const auto out = env.step(actions({H}));
  // The hover collects the nearest device of cell 0; its energy is the
  // data-delay term only.
  const double e = out.info.energy_j;
  EXPECT_GT(e, 0.0);
  EXPECT_DOUBLE_EQ(out.reward, 1.0 - cfg.lambda_energy * e / env.energy_norm());
  EXPECT_EQ(out.info.collisions, 0);
  EXPECT_EQ(out.info.strategic_visits, 0);
}

TEST(Step, FirstStrategicEntryEarnsFullBonus) {
  EnvConfig cfg;
  cfg.lambda_energy = 0.0;
  Environment env(cfg);
  env.reset(task_with(1, {5}), 1);
  const auto out = env.step(actions({E}));  // 5 -> 6, strategic
  EXPECT_EQ(out.reward, 1.0 + 1.0);
  EXPECT_EQ(out.info.strategic_visits, 1);
  // Hovering keeps serving with a shrinking bonus until the demand runs out.
  EXPECT_EQ(env.step(actions({H})).reward, 1.0 + 0.5);
  EXPECT_EQ(env.step(actions({H})).reward, 1.0 + 1.0 / 3.0);
  EXPECT_EQ(env.step(actions({H})).reward, 1.0);
  EXPECT_EQ(env.summary().satisfied_demand, 3.0);
  EXPECT_EQ(env.world().strategic()[0].demand, 0.0);
}

TEST(Step, EpisodeLengthAndDoneOnce) {
  EnvConfig cfg;
  Environment env(cfg);
  env.reset(task_with(4, {}), 3);
  int dones = 0;
  for (int m = 0; m < cfg.mission.slots; ++m) {
    const auto out = env.step(actions({N, E, S, W}));
    dones += out.done ? 1 : 0;
    EXPECT_EQ(out.done, m + 1 == cfg.mission.slots);
  }
  EXPECT_EQ(dones, 1);
  EXPECT_THROW(env.step(actions({H})), std::logic_error);
  int visits = 0;
  for (int v : env.summary().visit_counts) visits += v;
  EXPECT_EQ(visits, 4 * cfg.mission.slots);
}

TEST(Step, RandomPlayInvariants) {
  EnvConfig cfg;
  Environment env(cfg);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  for (int episode = 0; episode < 50; ++episode) {
    env.reset(task_with(7, {}), 100 + episode);
    std::vector<double> last_demand(3, 3.0);
    while (!env.done()) {
      std::vector<int> a(7);
      for (auto& x : a) x = pick(rng);
      const auto out = env.step(a);
      const int active = env.active_count();
      EXPECT_GE(out.reward, -active - cfg.lambda_energy);
      EXPECT_LE(out.reward, 2.0 * active);
      for (std::size_t s = 0; s < 3; ++s) {
        const double d = env.world().strategic()[s].demand;
        EXPECT_LE(d, last_demand[s]);
        EXPECT_GE(d, 0.0);
        last_demand[s] = d;
      }
      std::set<int> cells;
      for (const auto& u : env.world().uavs()) if (u.active) cells.insert(u.cell);
      EXPECT_EQ(static_cast<int>(cells.size()), active);
    }
    const auto& sum = env.summary();
    double per_uav = 0.0;
    for (const auto& u : env.world().uavs()) per_uav += u.energy_j;
    EXPECT_NEAR(sum.strategic_energy_j + sum.non_strategic_energy_j, per_uav, 1e-9 * per_uav);
    EXPECT_LE(sum.masked_energy_j, sum.unmasked_energy_j() + 1e-9);
    EXPECT_GE(sum.satisfaction(), 0.0);
    EXPECT_LE(sum.satisfaction(), 1.0);
  }
}

TEST(Step, DeterministicGivenSeedTaskAndActions) {
  EnvConfig cfg;
  Environment a(cfg), b(cfg);
  a.reset(task_with(5, {}), 77);
  b.reset(task_with(5, {}), 77);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, 4);
  while (!a.done()) {
    std::vector<int> act(7);
    for (auto& x : act) x = pick(rng);
    const auto oa = a.step(act);
    const auto ob = b.step(act);
    EXPECT_EQ(oa.reward, ob.reward);
    EXPECT_EQ(oa.next, ob.next);
  }
}

TEST(SwarmEvents, JoinAndLeave) {
  EnvConfig cfg;
  Environment env(cfg);
  env.reset(task_with(4, {}), 1);
  while (!env.done()) env.step(actions({H, H, H, H}));
  env.apply_swarm_event({1, SwarmEvent::Kind::kJoin, 1});
  EXPECT_EQ(env.active_count(), 5);
  EXPECT_EQ(env.encode_state().features.size(), 279u);
  env.reset(2);
  EXPECT_EQ(env.active_count(), 5);
  while (!env.done()) env.step(actions({H}));
  env.apply_swarm_event({2, SwarmEvent::Kind::kLeave, 2});
  EXPECT_EQ(env.active_count(), 3);
  EXPECT_THROW(env.apply_swarm_event({2, SwarmEvent::Kind::kLeave, 3}), std::invalid_argument);
}

TEST(SwarmEvents, OnlyAtTheScheduledBoundary) {
  Environment env(EnvConfig{});
  env.reset(task_with(4, {}), 1);
  EXPECT_THROW(env.apply_swarm_event({1, SwarmEvent::Kind::kJoin, 1}), std::logic_error);
  while (!env.done()) env.step(actions({H}));
  EXPECT_THROW(env.apply_swarm_event({5, SwarmEvent::Kind::kJoin, 1}), std::logic_error);
  EXPECT_NO_THROW(env.apply_swarm_event({1, SwarmEvent::Kind::kJoin, 1}));
}

TEST(SampleTask, DeterministicAndDistinct) {
  EnvConfig cfg;
  std::mt19937_64 a(5), b(5);
  const auto ta = sample_task(a, cfg);
  const auto tb = sample_task(b, cfg);
  EXPECT_EQ(ta.swarm_size, tb.swarm_size);
  EXPECT_EQ(ta.strategic_cells, tb.strategic_cells);
  EXPECT_EQ(ta.device_seed, tb.device_seed);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const auto t = sample_task(rng, cfg);
    EXPECT_EQ(std::set<int>(t.strategic_cells.begin(), t.strategic_cells.end()).size(), 3u);
  }
}

TEST(SampleTask, SwarmSizeFrequencies) {
  EnvConfig cfg;
  std::mt19937_64 rng(2024);
  std::map<int, int> counts;
  for (int i = 0; i < 1000; ++i) ++counts[sample_task(rng, cfg).swarm_size];
  ASSERT_EQ(counts.size(), 5u);
  EXPECT_EQ(counts.begin()->first, 3);
  EXPECT_EQ(counts.rbegin()->first, 7);
  // Binomial(1000, 0.2): sd ~ 12.6; allow ~4 sd.
  for (const auto& [size, n] : counts) EXPECT_NEAR(n, 200, 50) << "size " << size;
}

TEST(SampleTask, FixedStrategicCells) {
  EnvConfig cfg;
  cfg.family.fixed_strategic_cells = {6, 13, 22};
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_task(rng, cfg).strategic_cells, (std::vector<int>{6, 13, 22}));
}

TEST(EnvConfig, Validation) {
  EnvConfig cfg;
  cfg.family.max_swarm = 9;
  EXPECT_THROW(Environment{cfg}, std::invalid_argument);
  cfg = EnvConfig{};
  cfg.lambda_energy = -1.0;
  EXPECT_THROW(Environment{cfg}, std::invalid_argument);
}
