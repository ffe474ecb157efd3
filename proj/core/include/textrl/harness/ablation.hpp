#pragma once

#include <string>
#include <vector>

#include "textrl/harness/train.hpp"

namespace textrl::harness {

// First logged step whose last-100 average reaches `threshold`;
// max_steps + log_every when the run never does.
long steps_to_threshold(const RunMetrics& metrics, double threshold,
                        long max_steps, int log_every);

struct AblationReport {
  struct Row {
    std::string arm;
    std::uint64_t seed = 0;
    double final_score = 0.0;
    double max_seen = 0.0;
    long steps_to_threshold = 0;
  };
  double threshold = 0.0;
  std::vector<Row> rows;  // one per seed per arm
  std::vector<RunMetrics> arm_a_runs, arm_b_runs;
  std::string arm_a_label, arm_b_label;
  long median_a = 0, median_b = 0;
  Aggregate aggregate_a, aggregate_b;

  std::string to_text() const;
};

// Runs both arms over the same seed list. The two configs must differ only in
// their encoder source. The threshold is 0.9 x the game's max score. Learning
// curves land in out_dir/<arm>/seed<k>/metrics.csv when out_dir is given.
AblationReport ablation(const TrainConfig& arm_a, const TrainConfig& arm_b,
                        const std::string& out_dir = "");

}  // namespace textrl::harness
