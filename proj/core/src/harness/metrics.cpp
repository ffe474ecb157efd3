#include "textrl/harness/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "textrl/errors.hpp"

namespace textrl::harness {

double evaluate_last100(const std::vector<int>& finished_episode_scores) {
  if (finished_episode_scores.empty()) return 0.0;
  const std::size_t n = std::min<std::size_t>(100, finished_episode_scores.size());
  double total = 0.0;
  for (std::size_t i = finished_episode_scores.size() - n;
       i < finished_episode_scores.size(); ++i) {
    total += static_cast<double>(finished_episode_scores[i]);
  }
  return total / static_cast<double>(n);
}

Aggregate aggregate_runs(std::span<const RunMetrics> per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("aggregate_runs: no runs");
  Aggregate agg;
  for (const RunMetrics& run : per_seed) {
    agg.final_score += run.final_last100;
    agg.max_seen += run.final_max_seen;
  }
  agg.final_score /= static_cast<double>(per_seed.size());
  agg.max_seen /= static_cast<double>(per_seed.size());
  return agg;
}

namespace {
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::string(buf);
}
}  // namespace

std::string metrics_to_csv(const RunMetrics& metrics) {
  std::string out = "step,episodes,last100_avg,max_seen,td_loss,aux_loss\n";
  for (const auto& row : metrics.rows) {
    out += std::to_string(row.step) + "," + std::to_string(row.episodes) + "," +
           fmt(row.last100) + "," + fmt(row.max_seen) + "," + fmt(row.td_loss) +
           "," + fmt(row.aux_loss) + "\n";
  }
  return out;
}

void emit_metrics_csv(const RunMetrics& metrics, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write metrics file '" + path + "'");
  out << metrics_to_csv(metrics);
  if (!out) throw IoError("failed writing metrics file '" + path + "'");
}

}  // namespace textrl::harness
