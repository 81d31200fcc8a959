#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "uavswarm/mission.hpp"

using namespace uavswarm;

namespace {

MissionConfig table1() { return MissionConfig{}; }

std::vector<IotDevice> one_device_per_cell(const MissionConfig& cfg) {
  std::vector<IotDevice> devices;
  const double w = cfg.cell_width();
  for (int r = 0; r < cfg.cells_per_side; ++r) {
    for (int c = 0; c < cfg.cells_per_side; ++c) {
      IotDevice d;
      d.id = static_cast<int>(devices.size());
      d.position = {(c + 0.5) * w, (r + 0.5) * w};
      devices.push_back(d);
    }
  }
  return devices;
}

}  // namespace

TEST(BuildGrid, Table1Geometry) {
  const auto cfg = table1();
  const auto g = build_grid(cfg, {}, {6, 13, 22});
  EXPECT_EQ(g.cells().size(), 25u);
  EXPECT_DOUBLE_EQ(cfg.cell_width(), 88.0);
  EXPECT_EQ(g.cells()[0].center, (Vec2{44.0, 44.0}));
  EXPECT_EQ(g.strategic().size(), 3u);
  EXPECT_TRUE(g.is_strategic(13));
  EXPECT_FALSE(g.is_strategic(12));
  // Horizontally adjacent centers are exactly one width apart.
  EXPECT_EQ(g.cells()[1].center[0] - g.cells()[0].center[0], 88.0);
}

TEST(BuildGrid, TwoByTwoCenters) {
  MissionConfig cfg;
  cfg.area_m = 2.0;
  cfg.cells_per_side = 2;
  const auto g = build_grid(cfg, {}, {});
  ASSERT_EQ(g.cells().size(), 4u);
  EXPECT_EQ(g.cells()[0].center, (Vec2{0.5, 0.5}));
  EXPECT_EQ(g.cells()[1].center, (Vec2{1.5, 0.5}));
  EXPECT_EQ(g.cells()[2].center, (Vec2{0.5, 1.5}));
  EXPECT_EQ(g.cells()[3].center, (Vec2{1.5, 1.5}));
}

TEST(BuildGrid, Errors) {
  const auto cfg = table1();
  EXPECT_THROW(build_grid(cfg, {}, {3, 3}), std::invalid_argument);
  EXPECT_THROW(build_grid(cfg, {}, {25}), std::invalid_argument);
  EXPECT_THROW(build_grid(cfg, {}, {-1}), std::invalid_argument);
  IotDevice outside;
  outside.position = {500.0, 10.0};
  EXPECT_THROW(build_grid(cfg, {outside}, {}), std::invalid_argument);
}

TEST(MissionConfig, Validate) {
  MissionConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.speed_mps = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = MissionConfig{};
  cfg.slots = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(TravelTime, Examples) {
  EXPECT_EQ(travel_time_s({44, 44, 100}, {132, 44, 100}, 10.0), 8.8);
  EXPECT_EQ(travel_time_s({44, 44, 100}, {44, 44, 100}, 10.0), 0.0);
  EXPECT_NEAR(travel_time_s({44, 44, 100}, {132, 132, 100}, 10.0), 12.445079348883236, 1e-12);
}

TEST(DataDelay, Examples) {
  const Collection one{1e6, 1e6};
  EXPECT_EQ(data_delay_s(std::span<const Collection>(&one, 1)), 1.0);
  EXPECT_EQ(data_delay_s({}), 0.0);
  const std::vector<Collection> two{{1e6, 2e6}, {1e6, 1e6}};
  EXPECT_EQ(data_delay_s(two), 1.5);
  const std::vector<Collection> dead{{1e6, 0.0}};
  EXPECT_THROW(data_delay_s(dead), std::domain_error);
}

TEST(CompletionDelay, Examples) {
  EXPECT_EQ(completion_delay_s({{{0, 0, 100}}}, 10.0), 0.0);
  const std::vector<Vec3> legs{{44, 44, 100}, {132, 44, 100}, {220, 44, 100}, {308, 44, 100}};
  EXPECT_NEAR(completion_delay_s({legs}, 10.0), 26.4, 1e-12);
  const std::vector<Vec3> a{{44, 44, 100}, {132, 44, 100}};
  const std::vector<Vec3> b{{44, 132, 100}, {44, 220, 100}};
  EXPECT_NEAR(completion_delay_s({a, b}, 10.0), 17.6, 1e-12);
}

TEST(TotalDelay, Examples) {
  EXPECT_EQ(total_delay_s(10, 20), 30.0);
  EXPECT_EQ(total_delay_s(0, 0), 0.0);
  EXPECT_TRUE(within_deadline(0.0, 1.0));
  EXPECT_TRUE(within_deadline(600.0, 600.0));
  EXPECT_FALSE(within_deadline(600.0000001, 600.0));
}

TEST(Energy, Examples) {
  const auto cfg = table1();
  EXPECT_EQ(uav_energy_j(30, 10, cfg), 9050.0);
  EXPECT_EQ(uav_energy_j(0, 0, cfg), 0.0);
  EXPECT_EQ(uav_energy_j(1, 1, cfg), 305.0);
}

TEST(SwarmEnergy, DeltaMasking) {
  const std::vector<EnergyTerm> mixed{{100, true}, {200, false}};
  EXPECT_EQ(swarm_energy_j(mixed), 100.0);
  const std::vector<EnergyTerm> all{{100, true}, {200, true}, {0.5, true}};
  EXPECT_EQ(swarm_energy_j(all), 300.5);
  EXPECT_EQ(swarm_energy_j({}), 0.0);
}

TEST(Energy, AdditivityOverRandomDelays) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  const auto cfg = table1();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EnergyTerm> terms;
    double direct = 0.0;
    for (int k = 0; k < 7; ++k) {
      const double data = u(rng);
      const double e = uav_energy_j(data + u(rng), data, cfg);
      terms.push_back({e, true});
      direct += e;
    }
    EXPECT_LE(std::fabs(swarm_energy_j(terms) - direct), 1e-9 * direct);
  }
}

TEST(DelayDecomposition, PermutationInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> bits(1e5, 2e6), rate(1e5, 5e7);
  std::vector<Collection> xs;
  for (int i = 0; i < 12; ++i) xs.push_back({bits(rng), rate(rng)});
  const double base = data_delay_s(xs);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(xs.begin(), xs.end(), rng);
    EXPECT_NEAR(data_delay_s(xs), base, 1e-12 * base);
  }
}

TEST(Coverage, Examples) {
  const auto cfg = table1();
  auto g = build_grid(cfg, {}, {6, 13, 22}, 3.0, 1);
  g.place_uav(0, 6);
  g.uavs()[0].active = true;
  // The start cell does not count as a visit.
  EXPECT_FALSE(strategic_coverage_satisfied(g));
  AirGroundParams link;
  RadioConfig radio;
  advance_uav_slot(g, 0, 13, 1, link, radio);
  EXPECT_FALSE(strategic_coverage_satisfied(g));
  advance_uav_slot(g, 0, 22, 2, link, radio);
  advance_uav_slot(g, 0, 6, 3, link, radio);
  EXPECT_TRUE(strategic_coverage_satisfied(g));

  auto empty = build_grid(cfg, {}, {});
  EXPECT_TRUE(strategic_coverage_satisfied(empty));
}

TEST(AdvanceSlot, MoveCollectsAndAccrues) {
  const auto cfg = table1();
  auto g = build_grid(cfg, one_device_per_cell(cfg), {1}, 3.0, 1);
  g.place_uav(0, 0);
  g.uavs()[0].active = true;
  AirGroundParams link;
  RadioConfig radio;
  const auto acc = advance_uav_slot(g, 0, 1, 1, link, radio);
  EXPECT_EQ(acc.travel_s, 8.8);
  EXPECT_EQ(acc.device, 1);
  // Overhead collection at 100 m from the cell-center device.
  EXPECT_NEAR(acc.rate_bps, 36023085.600588619566, 1e-3);
  EXPECT_NEAR(acc.data_s, 1e6 / 36023085.600588619566, 1e-12);
  EXPECT_TRUE(acc.rate_ok);
  EXPECT_DOUBLE_EQ(acc.energy_j, uav_energy_j(acc.travel_s + acc.data_s, acc.data_s, cfg));
  EXPECT_TRUE(g.uavs()[0].served_strategic);
  EXPECT_GT(g.uavs()[0].energy_j, 0.0);

  // Hovering over an exhausted cell costs nothing under the delay-based model.
  const double before = g.uavs()[0].energy_j;
  const auto hover = advance_uav_slot(g, 0, 1, 2, link, radio);
  EXPECT_EQ(hover.device, -1);
  EXPECT_EQ(hover.energy_j, 0.0);
  EXPECT_EQ(g.uavs()[0].energy_j, before);
}

TEST(AdvanceSlot, RateBelowFloorIsRecorded) {
  const auto cfg = table1();
  auto g = build_grid(cfg, one_device_per_cell(cfg), {}, 3.0, 1);
  g.place_uav(0, 0);
  AirGroundParams link;
  RadioConfig radio;
  radio.rate_floor_bps = 1e9;
  const auto acc = advance_uav_slot(g, 0, 1, 1, link, radio);
  EXPECT_FALSE(acc.rate_ok);
  EXPECT_EQ(g.uavs()[0].rate_violation_slot, 1);
}

TEST(DeviceLayout, DeterministicAndInside) {
  const auto cfg = table1();
  const auto a = default_device_layout(cfg, 7, 0.1);
  const auto b = default_device_layout(cfg, 7, 0.1);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].position, b[i].position);
    EXPECT_GE(a[i].position[0], 0.0);
    EXPECT_LE(a[i].position[0], cfg.area_m);
  }
  EXPECT_NE(default_device_layout(cfg, 8, 0.1)[0].position, a[0].position);
}

TEST(LayoutFile, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "uavswarm_layout_test.json";
  WorldLayout layout;
  layout.strategic_cells = {1, 2, 3};
  layout.devices = default_device_layout(table1(), 3, 0.1);
  write_layout_file(path.string(), layout);
  const auto back = read_layout_file(path.string());
  EXPECT_EQ(back.strategic_cells, layout.strategic_cells);
  ASSERT_EQ(back.devices.size(), layout.devices.size());
  EXPECT_EQ(back.devices[5].position, layout.devices[5].position);
  std::filesystem::remove(path);
}
