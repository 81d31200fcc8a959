#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uavswarm/link_budget.hpp"

using namespace uavswarm;

namespace {

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

LinkGeometry geom(double ux, double uy, double h, double dx = 0.0, double dy = 0.0) {
  LinkGeometry g;
  g.uav_xyz = {ux, uy, h};
  g.device_xy = {dx, dy};
  return g;
}

// Reference values below come from a 40-digit evaluation of the closed forms.
constexpr double kElev888888 = 38.78293682187281828;
constexpr double kPlos90 = 0.99978534605798357698;
constexpr double kLlos100 = 140229153.85929726607;
constexpr double kLnlos100 = 14022915385.929726607;
constexpr double kMeanOverhead100 = 143209127.18478830615;
constexpr double kRateOverhead100 = 36023085.600588619566;
constexpr double kMaxAltitude = 11942516.254954135963;
constexpr double kMaxAltitudeLiteral = 142623694499843.76101;

}  // namespace

TEST(Elevation, Examples) {
  EXPECT_DOUBLE_EQ(elevation_angle_deg(geom(0, 0, 100)), 90.0);
  EXPECT_NEAR(elevation_angle_deg(geom(100, 0, 100)), 45.0, 1e-12);
  EXPECT_LT(rel_err(elevation_angle_deg(geom(88, 88, 100)), kElev888888), 1e-13);
}

TEST(Elevation, ZeroDistanceIsDomainError) {
  EXPECT_THROW(elevation_angle_deg(geom(5, 5, 0, 5, 5)), std::domain_error);
}

TEST(LosProbability, Examples) {
  AirGroundParams p;
  EXPECT_NEAR(los_probability(11.95, p), 1.0 / 12.95, 1e-15);
  EXPECT_LT(rel_err(los_probability(90.0, p), kPlos90), 1e-13);
  for (double t : {1.0, 10.0, 45.0, 90.0}) {
    EXPECT_EQ(los_probability(t, p) + nlos_probability(t, p), 1.0);
  }
}

TEST(PathLoss, Examples) {
  AirGroundParams p;
  p.psi_los = 1.0;
  p.psi_nlos = 1.0;
  const double d0 = kSpeedOfLight / (4.0 * kPi * p.carrier_hz);
  EXPECT_NEAR(path_loss_los(d0, p), 1.0, 1e-14);
  EXPECT_NEAR(path_loss_nlos(d0, p), 1.0, 1e-14);

  AirGroundParams urban;
  EXPECT_LT(rel_err(path_loss_los(100.0, urban), kLlos100), 1e-12);
  EXPECT_LT(rel_err(path_loss_nlos(100.0, urban), kLnlos100), 1e-12);
  EXPECT_LT(rel_err(path_loss_nlos(37.0, urban) / path_loss_los(37.0, urban),
                    urban.psi_nlos / urban.psi_los),
            1e-12);
  EXPECT_LT(rel_err(path_loss_los(200.0, urban), 4.0 * path_loss_los(100.0, urban)), 1e-14);
  EXPECT_THROW(path_loss_los(0.0, urban), std::domain_error);
}

TEST(MeanPathLoss, Examples) {
  AirGroundParams equal;
  equal.psi_nlos = equal.psi_los;
  const auto g = geom(30, 40, 100);
  EXPECT_LT(rel_err(mean_path_loss(g, equal), path_loss_los(g.distance_m(), equal)), 1e-14);

  AirGroundParams urban;
  const auto overhead = geom(0, 0, 100);
  EXPECT_LT(rel_err(mean_path_loss(overhead, urban), kMeanOverhead100), 1e-12);
  EXPECT_LT(rel_err(mean_channel_gain(overhead, urban), 1.0 / kMeanOverhead100), 1e-12);
}

TEST(Rate, Examples) {
  AirGroundParams p;
  RadioConfig r;
  const auto g = geom(0, 0, 100);
  // Choose the noise so that P_r / sigma^2 hits 1 and 3 exactly.
  const double pr = r.device_tx_watts * mean_channel_gain(g, p);
  p.noise_watts = pr;
  EXPECT_NEAR(achievable_rate_bps(g, p, r), 1.0e6, 1e-6);
  p.noise_watts = pr / 3.0;
  EXPECT_NEAR(achievable_rate_bps(g, p, r), 2.0e6, 1e-6);

  AirGroundParams urban;
  EXPECT_LT(rel_err(achievable_rate_bps(g, urban, r), kRateOverhead100), 1e-11);
}

TEST(Rate, FloorIsInclusive) {
  RadioConfig r;
  EXPECT_TRUE(rate_feasible(r.rate_floor_bps, r));
  EXPECT_FALSE(rate_feasible(r.rate_floor_bps - 1.0, r));
  EXPECT_TRUE(rate_feasible(2.0 * r.rate_floor_bps, r));
}

TEST(MaxAltitude, Examples) {
  AirGroundParams p;
  EXPECT_LT(rel_err(max_altitude_m(p), kMaxAltitude), 1e-12);
  EXPECT_LT(rel_err(max_altitude_m(p, AltitudeBoundForm::kLiteral), kMaxAltitudeLiteral), 1e-12);

  const double f0 = 4.0 * kPi * p.carrier_hz / kSpeedOfLight;
  p.max_tx_watts = p.min_snr * f0 * f0 * p.noise_watts * p.psi_los;
  EXPECT_NEAR(max_altitude_m(p), 1.0, 1e-12);

  AirGroundParams q;
  const double h = max_altitude_m(q);
  q.max_tx_watts *= 4.0;
  EXPECT_LT(rel_err(max_altitude_m(q), 2.0 * h), 1e-14);
}

TEST(MaxAltitude, OverheadLinkAtBoundMeetsSnrExactly) {
  AirGroundParams p;
  const double h = max_altitude_m(p);
  const double snr = p.max_tx_watts / (path_loss_los(h, p) * p.noise_watts);
  EXPECT_LT(rel_err(snr, p.min_snr), 1e-9);
}

TEST(Units, DbRoundTrip) {
  for (double db : {-170.0, -3.0, 0.0, 0.1, 3.0, 23.0}) {
    EXPECT_LT(std::fabs(linear_to_db(db_to_linear(db)) - db), 1e-12 * std::max(1.0, std::fabs(db)));
  }
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_NEAR(watts_to_dbm(0.2), 23.0103, 1e-4);
}

TEST(Presets, UrbanAndSuburban) {
  const auto urban = environment_preset("urban");
  EXPECT_EQ(urban.omega1, 11.95);
  EXPECT_EQ(urban.omega2, 0.14);
  EXPECT_NEAR(linear_to_db(urban.psi_nlos), 23.0, 1e-12);
  EXPECT_NO_THROW(environment_preset("suburban"));
  EXPECT_THROW(environment_preset("lunar"), std::invalid_argument);
}

TEST(Params, ValidateRejectsNonPositive) {
  AirGroundParams p;
  EXPECT_NO_THROW(p.validate());
  p.carrier_hz = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  RadioConfig r;
  r.bandwidth_hz = -1.0;
  EXPECT_THROW(r.validate(), std::invalid_argument);
}

TEST(Properties, MonotoneInAngleAndDistance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> theta(0.5, 89.5), dist(1.0, 2000.0);
  AirGroundParams p;
  for (int i = 0; i < 500; ++i) {
    const double a = theta(rng), b = theta(rng);
    if (a == b) continue;
    EXPECT_EQ(los_probability(a, p) < los_probability(b, p), a < b);
    const double d1 = dist(rng), d2 = dist(rng);
    if (d1 == d2) continue;
    EXPECT_EQ(path_loss_los(d1, p) < path_loss_los(d2, p), d1 < d2);
    EXPECT_EQ(path_loss_nlos(d1, p) < path_loss_nlos(d2, p), d1 < d2);
  }
}
