#pragma once

// Air-to-ground channel: elevation-dependent LoS probability, free-space
// path loss with LoS/NLoS excess loss, mean channel gain, Shannon rate and
// the LoS altitude bound for a minimum SNR.

#include <array>
#include <string_view>

namespace uavswarm {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

double db_to_linear(double db);
double linear_to_db(double ratio);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Environment constants of the air-to-ground link. All power ratios are
/// stored linear; presets and config files supply the dB forms.
struct AirGroundParams {
  double omega1 = 11.95;
  double omega2 = 0.14;
  double psi_los = db_to_linear(3.0);
  double psi_nlos = db_to_linear(23.0);
  double carrier_hz = 2.0e9;
  double noise_watts = dbm_to_watts(-170.0);
  double min_snr = db_to_linear(10.0);
  double max_tx_watts = 0.2;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

/// Named environment presets ("urban", "suburban"). Only the propagation
/// constants (omega1, omega2, psi_los, psi_nlos) are taken from the preset.
AirGroundParams environment_preset(std::string_view name);

struct LinkGeometry {
  std::array<double, 3> uav_xyz{};
  std::array<double, 2> device_xy{};

  double distance_m() const;
  double altitude_m() const { return uav_xyz[2]; }
};

struct RadioConfig {
  double bandwidth_hz = 1.0e6;
  double device_tx_watts = 0.1;
  double rate_floor_bps = 1.0e6;

  void validate() const;
};

double elevation_angle_deg(const LinkGeometry& geom);
double los_probability(double theta_deg, const AirGroundParams& params);
double nlos_probability(double theta_deg, const AirGroundParams& params);

/// (4 pi f_c d / c)^2
double free_space_factor(double distance_m, const AirGroundParams& params);
double path_loss_los(double distance_m, const AirGroundParams& params);
double path_loss_nlos(double distance_m, const AirGroundParams& params);

/// LoS-probability weighted mixture of the two path losses.
double mean_path_loss(const LinkGeometry& geom, const AirGroundParams& params);
double mean_channel_gain(const LinkGeometry& geom, const AirGroundParams& params);

double received_snr(const LinkGeometry& geom, const AirGroundParams& params,
                    const RadioConfig& radio);
double achievable_rate_bps(const LinkGeometry& geom, const AirGroundParams& params,
                           const RadioConfig& radio);
bool rate_feasible(double rate_bps, const RadioConfig& radio);

enum class AltitudeBoundForm {
  kSquareRoot,  // meters
  kLiteral,     // the bracketed ratio without the root (square meters)
};

double max_altitude_m(const AirGroundParams& params,
                      AltitudeBoundForm form = AltitudeBoundForm::kSquareRoot);

}  // namespace uavswarm
