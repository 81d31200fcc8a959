#include "uavswarm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace uavswarm {

namespace {

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<int> split_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ';');) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::size_t tail_start(std::size_t n, double fraction) {
  const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n * fraction)));
  return n > keep ? n - keep : 0;
}

template <typename F>
double tail_mean_of(std::span<const EpisodeMetrics> rows, double fraction, F&& field) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  const std::size_t start = tail_start(rows.size(), fraction);
  for (std::size_t i = start; i < rows.size(); ++i) sum += field(rows[i]);
  return sum / static_cast<double>(rows.size() - start);
}

}  // namespace

std::string format_number(double value) {
  // Shortest form that reads back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

EpisodeMetrics metrics_from_summary(int episode, const EpisodeSummary& s,
                                    const std::vector<int>& strategic_cells) {
  EpisodeMetrics m;
  m.episode = episode;
  m.swarm_size = s.swarm_size;
  m.reward = s.total_reward;
  m.strategic_energy_j = s.strategic_energy_j;
  m.non_strategic_energy_j = s.non_strategic_energy_j;
  m.masked_energy_j = s.masked_energy_j;
  m.satisfaction = s.satisfaction();
  m.collisions = s.collisions;
  m.violations = s.violations;
  m.steps = s.steps;
  m.strategic_cells = strategic_cells;
  m.visits = s.visit_counts;
  return m;
}

void write_metrics_csv(std::ostream& out, std::span<const EpisodeMetrics> rows) {
  out << kMetricsHeader << '\n';
  for (const auto& m : rows) {
    out << m.episode << ',' << m.swarm_size << ',' << format_number(m.reward) << ','
        << format_number(m.strategic_energy_j) << ',' << format_number(m.non_strategic_energy_j)
        << ',' << format_number(m.unmasked_energy_j()) << ',' << format_number(m.masked_energy_j)
        << ',' << format_number(m.satisfaction) << ',' << m.collisions << ',' << m.violations
        << ',' << m.steps << ',' << join(m.strategic_cells) << ',' << join(m.visits) << '\n';
  }
}

std::vector<EpisodeMetrics> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("metrics file has an unexpected header");
  }
  std::vector<EpisodeMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 13) {
      throw std::runtime_error("metrics row " + std::to_string(rows.size() + 1) +
                               " has " + std::to_string(f.size()) + " fields, expected 13");
    }
    EpisodeMetrics m;
    m.episode = std::stoi(f[0]);
    m.swarm_size = std::stoi(f[1]);
    m.reward = std::stod(f[2]);
    m.strategic_energy_j = std::stod(f[3]);
    m.non_strategic_energy_j = std::stod(f[4]);
    m.masked_energy_j = std::stod(f[6]);
    m.satisfaction = std::stod(f[7]);
    m.collisions = std::stoi(f[8]);
    m.violations = std::stoi(f[9]);
    m.steps = std::stoi(f[10]);
    m.strategic_cells = split_ints(f[11]);
    m.visits = split_ints(f[12]);
    rows.push_back(std::move(m));
  }
  return rows;
}

std::vector<EpisodeMetrics> read_metrics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path);
  return read_metrics_csv(in);
}

std::vector<double> moving_average(std::span<const double> values, int window) {
  if (window < 1) throw std::invalid_argument("moving average window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
    const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

double tail_mean(std::span<const double> values, double fraction) {
  if (values.empty()) return 0.0;
  const std::size_t start = tail_start(values.size(), fraction);
  return std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(start), values.end(), 0.0) /
         static_cast<double>(values.size() - start);
}

int episodes_to_converge(std::span<const double> rewards, double floor, int window,
                         double fraction) {
  if (rewards.empty()) return 0;
  const double plateau = tail_mean(rewards, 0.1);
  const double threshold = floor + fraction * (plateau - floor);
  const auto ma = moving_average(rewards, window);
  const std::size_t first = std::min(ma.size(), static_cast<std::size_t>(window)) - 1;
  for (std::size_t i = first; i < ma.size(); ++i) {
    if (ma[i] >= threshold) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(ma.size());
}

double final_satisfaction(std::span<const EpisodeMetrics> rows, double fraction) {
  return tail_mean_of(rows, fraction, [](const EpisodeMetrics& m) { return m.satisfaction; });
}

double VisitRatio::ratio() const {
  if (non_strategic_mean > 0.0) return strategic_mean / non_strategic_mean;
  return strategic_mean > 0.0 ? INFINITY : 0.0;
}

VisitRatio visit_ratio(std::span<const EpisodeMetrics> rows, double fraction) {
  VisitRatio r;
  if (rows.empty()) return r;
  const std::size_t start = tail_start(rows.size(), fraction);
  double s_sum = 0.0, o_sum = 0.0;
  std::size_t s_n = 0, o_n = 0;
  for (std::size_t i = start; i < rows.size(); ++i) {
    const auto& m = rows[i];
    for (std::size_t c = 0; c < m.visits.size(); ++c) {
      const bool strategic = std::find(m.strategic_cells.begin(), m.strategic_cells.end(),
                                       static_cast<int>(c)) != m.strategic_cells.end();
      (strategic ? s_sum : o_sum) += m.visits[c];
      ++(strategic ? s_n : o_n);
    }
  }
  r.strategic_mean = s_n ? s_sum / static_cast<double>(s_n) : 0.0;
  r.non_strategic_mean = o_n ? o_sum / static_cast<double>(o_n) : 0.0;
  return r;
}

PlotKind plot_kind_from_string(const std::string& kind) {
  if (kind == "heatmap") return PlotKind::kHeatmap;
  if (kind == "learning_curve") return PlotKind::kLearningCurve;
  if (kind == "energy_bars") return PlotKind::kEnergyBars;
  if (kind == "satisfaction_bars") return PlotKind::kSatisfactionBars;
  throw std::invalid_argument("unknown plot kind \"" + kind +
                              "\" (expected heatmap, learning_curve, energy_bars or "
                              "satisfaction_bars)");
}

void emit_plot_data(std::span<const EpisodeMetrics> rows, PlotKind kind, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("no metrics rows to emit");
  switch (kind) {
    case PlotKind::kHeatmap: {
      const std::size_t cells = rows.back().visits.size();
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells))));
      if (static_cast<std::size_t>(side * side) != cells) {
        throw std::invalid_argument("visit counts do not form a square grid");
      }
      const std::size_t start = tail_start(rows.size(), 0.1);
      std::vector<double> mean(cells, 0.0);
      for (std::size_t i = start; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < cells && c < rows[i].visits.size(); ++c) mean[c] += rows[i].visits[c];
      }
      const auto& strategic = rows.back().strategic_cells;
      out << "cell_x,cell_y,visits,is_strategic\n";
      for (std::size_t c = 0; c < cells; ++c) {
        const bool s = std::find(strategic.begin(), strategic.end(), static_cast<int>(c)) !=
                       strategic.end();
        out << static_cast<int>(c) % side << ',' << static_cast<int>(c) / side << ','
            << format_number(mean[c] / static_cast<double>(rows.size() - start)) << ','
            << (s ? 1 : 0) << '\n';
      }
      return;
    }
    case PlotKind::kLearningCurve: {
      std::vector<double> rewards;
      for (const auto& m : rows) rewards.push_back(m.reward);
      const auto ma = moving_average(rewards, 50);
      out << "episode,reward,reward_ma50,satisfaction,swarm_size\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out << rows[i].episode << ',' << format_number(rows[i].reward) << ','
            << format_number(ma[i]) << ',' << format_number(rows[i].satisfaction) << ','
            << rows[i].swarm_size << '\n';
      }
      return;
    }
    case PlotKind::kEnergyBars:
    case PlotKind::kSatisfactionBars: {
      std::map<int, std::vector<EpisodeMetrics>> groups;
      for (const auto& m : rows) groups[m.swarm_size].push_back(m);
      if (kind == PlotKind::kEnergyBars) {
        out << "swarm_size,strategic_energy_j,non_strategic_energy_j\n";
      } else {
        out << "swarm_size,satisfaction\n";
      }
      for (const auto& [size, group] : groups) {
        out << size << ',';
        if (kind == PlotKind::kEnergyBars) {
          out << format_number(tail_mean_of(group, 0.1, [](const EpisodeMetrics& m) {
                   return m.strategic_energy_j;
                 }))
              << ','
              << format_number(tail_mean_of(group, 0.1, [](const EpisodeMetrics& m) {
                   return m.non_strategic_energy_j;
                 }));
        } else {
          out << format_number(final_satisfaction(group));
        }
        out << '\n';
      }
      return;
    }
  }
}

}  // namespace uavswarm
