#include "uavswarm/link_budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uavswarm {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void AirGroundParams::validate() const {
  require_positive(omega1, "omega1");
  require_positive(omega2, "omega2");
  require_positive(carrier_hz, "carrier_hz");
  require_positive(noise_watts, "noise_watts");
  require_positive(min_snr, "min_snr");
  require_positive(max_tx_watts, "max_tx_watts");
  if (!(psi_los >= 1.0)) throw std::invalid_argument("psi_los must be >= 1 (>= 0 dB)");
  if (!(psi_nlos >= psi_los)) throw std::invalid_argument("psi_nlos must be >= psi_los");
}

void RadioConfig::validate() const {
  require_positive(bandwidth_hz, "bandwidth_hz");
  require_positive(device_tx_watts, "device_tx_watts");
  require_positive(rate_floor_bps, "rate_floor_bps");
}

AirGroundParams environment_preset(std::string_view name) {
  AirGroundParams p;
  if (name == "urban") {
    p.omega1 = 11.95;
    p.omega2 = 0.14;
    p.psi_los = db_to_linear(3.0);
    p.psi_nlos = db_to_linear(23.0);
  } else if (name == "suburban") {
    p.omega1 = 4.88;
    p.omega2 = 0.43;
    p.psi_los = db_to_linear(0.1);
    p.psi_nlos = db_to_linear(21.0);
  } else {
    throw std::invalid_argument("unknown environment preset: " + std::string(name));
  }
  return p;
}

double LinkGeometry::distance_m() const {
  const double dx = uav_xyz[0] - device_xy[0];
  const double dy = uav_xyz[1] - device_xy[1];
  return std::sqrt(dx * dx + dy * dy + uav_xyz[2] * uav_xyz[2]);
}

double elevation_angle_deg(const LinkGeometry& geom) {
  const double d = geom.distance_m();
  if (!(d > 0.0)) throw std::domain_error("elevation angle undefined at zero distance");
  if (!(geom.altitude_m() > 0.0)) throw std::domain_error("UAV altitude must be positive");
  // Clamp guards asin against h/d rounding to just above 1.
  const double ratio = std::min(1.0, geom.altitude_m() / d);
  return 180.0 / kPi * std::asin(ratio);
}

double los_probability(double theta_deg, const AirGroundParams& params) {
  return 1.0 / (1.0 + params.omega1 * std::exp(-params.omega2 * (theta_deg - params.omega1)));
}

double nlos_probability(double theta_deg, const AirGroundParams& params) {
  return 1.0 - los_probability(theta_deg, params);
}

double free_space_factor(double distance_m, const AirGroundParams& params) {
  if (!(distance_m > 0.0)) throw std::domain_error("path loss undefined at zero distance");
  const double f = 4.0 * kPi * params.carrier_hz * distance_m / kSpeedOfLight;
  return f * f;
}

double path_loss_los(double distance_m, const AirGroundParams& params) {
  return params.psi_los * free_space_factor(distance_m, params);
}

double path_loss_nlos(double distance_m, const AirGroundParams& params) {
  return params.psi_nlos * free_space_factor(distance_m, params);
}

double mean_path_loss(const LinkGeometry& geom, const AirGroundParams& params) {
  const double p_los = los_probability(elevation_angle_deg(geom), params);
  const double d = geom.distance_m();
  return p_los * path_loss_los(d, params) + (1.0 - p_los) * path_loss_nlos(d, params);
}

double mean_channel_gain(const LinkGeometry& geom, const AirGroundParams& params) {
  return 1.0 / mean_path_loss(geom, params);
}

double received_snr(const LinkGeometry& geom, const AirGroundParams& params,
                    const RadioConfig& radio) {
  return radio.device_tx_watts * mean_channel_gain(geom, params) / params.noise_watts;
}

double achievable_rate_bps(const LinkGeometry& geom, const AirGroundParams& params,
                           const RadioConfig& radio) {
  return radio.bandwidth_hz * std::log2(1.0 + received_snr(geom, params, radio));
}

bool rate_feasible(double rate_bps, const RadioConfig& radio) {
  return rate_bps >= radio.rate_floor_bps;
}

double max_altitude_m(const AirGroundParams& params, AltitudeBoundForm form) {
  const double f0 = 4.0 * kPi * params.carrier_hz / kSpeedOfLight;
  const double ratio =
      params.max_tx_watts / (params.min_snr * f0 * f0 * params.noise_watts * params.psi_los);
  return form == AltitudeBoundForm::kLiteral ? ratio : std::sqrt(ratio);
}

}  // namespace uavswarm
