#pragma once

// Per-episode metrics, their CSV form, convergence and satisfaction
// summaries, and the plot-data emitters.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavswarm/env.hpp"

namespace uavswarm {

struct EpisodeMetrics {
  int episode = 0;
  int swarm_size = 0;
  double reward = 0.0;
  double strategic_energy_j = 0.0;
  double non_strategic_energy_j = 0.0;
  double masked_energy_j = 0.0;
  double satisfaction = 0.0;
  int collisions = 0;
  int violations = 0;
  int steps = 0;
  std::vector<int> strategic_cells;
  std::vector<int> visits;  // one entry per cell

  double unmasked_energy_j() const { return strategic_energy_j + non_strategic_energy_j; }
  bool operator==(const EpisodeMetrics&) const = default;
};

EpisodeMetrics metrics_from_summary(int episode, const EpisodeSummary& summary,
                                    const std::vector<int>& strategic_cells);

/// Fixed column order; lists are ';'-joined.
inline constexpr const char* kMetricsHeader =
    "episode,swarm_size,reward,strategic_energy_j,non_strategic_energy_j,unmasked_energy_j,"
    "masked_energy_j,satisfaction,collisions,violations,steps,strategic_cells,visits";

void write_metrics_csv(std::ostream& out, std::span<const EpisodeMetrics> rows);
std::vector<EpisodeMetrics> read_metrics_csv(std::istream& in);
std::vector<EpisodeMetrics> read_metrics_file(const std::string& path);

/// Trailing moving average; the first window-1 entries average what exists.
std::vector<double> moving_average(std::span<const double> values, int window);

/// Mean of the last `fraction` of the values (at least one).
double tail_mean(std::span<const double> values, double fraction = 0.1);

/// Number of episodes until the trailing moving average first reaches
/// floor + fraction * (plateau - floor), with plateau the tail mean. Only
/// full windows count, so the answer is at least min(window, size).
/// floor = 0 gives the plain "90% of plateau" reading.
int episodes_to_converge(std::span<const double> rewards, double floor, int window = 50,
                         double fraction = 0.9);

double final_satisfaction(std::span<const EpisodeMetrics> rows, double fraction = 0.1);

struct VisitRatio {
  double strategic_mean = 0.0;
  double non_strategic_mean = 0.0;
  double ratio() const;
};
/// Mean per-episode visits of strategic vs other cells over the tail.
VisitRatio visit_ratio(std::span<const EpisodeMetrics> rows, double fraction = 0.1);

enum class PlotKind { kHeatmap, kLearningCurve, kEnergyBars, kSatisfactionBars };
PlotKind plot_kind_from_string(const std::string& kind);

/// heatmap: cell_x,cell_y,visits,is_strategic (tail-mean visits per cell)
/// learning_curve: episode,reward,reward_ma50,satisfaction,swarm_size
/// energy_bars: swarm_size,strategic_energy_j,non_strategic_energy_j
/// satisfaction_bars: swarm_size,satisfaction
/// Bars group episodes by swarm size and average the tail of each group.
void emit_plot_data(std::span<const EpisodeMetrics> rows, PlotKind kind, std::ostream& out);

std::string format_number(double value);

}  // namespace uavswarm
