#include "textrl/harness/ablation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "textrl/env/dsl.hpp"

namespace textrl::harness {

namespace {

long median_of(std::vector<long> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0;
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2;
}

void check_configs_match(const TrainConfig& a, const TrainConfig& b) {
  auto ea = a.echo();
  auto eb = b.echo();
  ea.erase("encoder");
  eb.erase("encoder");
  ea.erase("encoder-pooled");
  eb.erase("encoder-pooled");
  if (ea != eb)
    throw std::invalid_argument(
        "ablation arms must differ only in their encoder source");
}

}  // namespace

long steps_to_threshold(const RunMetrics& metrics, double threshold,
                        long max_steps, int log_every) {
  for (const auto& row : metrics.rows) {
    if (row.last100 >= threshold) return row.step;
  }
  return max_steps + log_every;
}

std::string AblationReport::to_text() const {
  std::ostringstream out;
  out << "threshold " << threshold << "\n";
  for (const auto& row : rows) {
    out << row.arm << " seed " << row.seed << ": final " << row.final_score
        << " max_seen " << row.max_seen << " steps_to_threshold "
        << row.steps_to_threshold << "\n";
  }
  out << arm_a_label << ": aggregate final " << aggregate_a.final_score
      << " max_seen " << aggregate_a.max_seen << " median_steps " << median_a << "\n";
  out << arm_b_label << ": aggregate final " << aggregate_b.final_score
      << " max_seen " << aggregate_b.max_seen << " median_steps " << median_b << "\n";
  return out.str();
}

AblationReport ablation(const TrainConfig& arm_a, const TrainConfig& arm_b,
                        const std::string& out_dir) {
  check_configs_match(arm_a, arm_b);
  env::GameSpec game = env::load_game_file(arm_a.game_path);

  AblationReport report;
  report.threshold = 0.9 * static_cast<double>(game.max_score());
  report.arm_a_label = arm_a.encoder;
  report.arm_b_label = arm_b.encoder;

  auto run_arm = [&](const TrainConfig& cfg, const std::string& arm_name,
                     std::vector<RunMetrics>& runs) {
    std::vector<long> steps;
    for (std::uint64_t seed : cfg.seeds) {
      std::string dir;
      if (!out_dir.empty())
        dir = out_dir + "/" + arm_name + "/seed" + std::to_string(seed);
      RunMetrics metrics = train_single(game, cfg, seed, dir).metrics;
      long stt = steps_to_threshold(metrics, report.threshold, cfg.max_steps,
                                    cfg.log_every);
      report.rows.push_back(AblationReport::Row{arm_name, seed, metrics.final_last100,
                                                metrics.final_max_seen, stt});
      steps.push_back(stt);
      runs.push_back(std::move(metrics));
    }
    return median_of(steps);
  };

  report.median_a = run_arm(arm_a, "arm_a", report.arm_a_runs);
  report.median_b = run_arm(arm_b, "arm_b", report.arm_b_runs);
  report.aggregate_a = aggregate_runs(report.arm_a_runs);
  report.aggregate_b = aggregate_runs(report.arm_b_runs);
  return report;
}

}  // namespace textrl::harness
