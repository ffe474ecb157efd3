#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace textrl::harness {

struct RunMetrics {
  struct Row {
    long step = 0;
    long episodes = 0;
    double last100 = 0.0;
    double max_seen = 0.0;
    double td_loss = 0.0;
    double aux_loss = 0.0;
  };
  std::uint64_t seed = 0;
  std::vector<Row> rows;
  long episodes_finished = 0;
  long env_interactions = 0;
  double final_last100 = 0.0;
  double final_max_seen = 0.0;
};

// Mean of the final min(100, n) episode scores; 0 with no finished episode.
double evaluate_last100(const std::vector<int>& finished_episode_scores);

struct Aggregate {
  double final_score = 0.0;  // mean of per-seed final last-100 scores
  double max_seen = 0.0;     // mean of per-seed max-seen scores
};
Aggregate aggregate_runs(std::span<const RunMetrics> per_seed);

// header + one row per logging step, decimal points, LF endings.
std::string metrics_to_csv(const RunMetrics& metrics);
void emit_metrics_csv(const RunMetrics& metrics, const std::string& path);

}  // namespace textrl::harness
