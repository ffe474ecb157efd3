#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "textrl/agent/agent.hpp"
#include "textrl/env/engine.hpp"
#include "textrl/env/transcript.hpp"
#include "textrl/harness/metrics.hpp"

namespace textrl::harness {

struct TrainConfig {
  std::string game_path;
  agent::AgentKind agent = agent::AgentKind::kDrrn;
  std::string encoder = "scratch";  // scratch | bow | encoder checkpoint path
  bool encoder_pooled = false;
  int env_count = 8;
  long max_steps = 50000;
  double gamma = 0.9;
  double lr = 1e-4;
  double temperature = 1.0;
  double eval_temperature = 0.01;
  std::vector<std::uint64_t> seeds = {1, 2};
  int batch_size = 32;
  int eval_window = 100;
  std::size_t replay_general_cap = 100000;
  std::size_t replay_priority_cap = 10000;
  double priority_fraction = 0.5;
  int embed_dim = 16;
  int hidden_dim = 32;
  int log_every = 100;
  double grad_clip = 5.0;

  // key = value lines, keys named after the CLI flags.
  std::map<std::string, std::string> echo() const;
};

struct TrainOutput {
  RunMetrics metrics;
  std::unique_ptr<agent::Agent> agent;
  std::shared_ptr<const lm::FrozenEncoder> encoder;  // null unless pretrained
};

// One deterministic run: per global step a round-robin pass over env_count
// environment instances (valid actions, softmax selection, env step,
// episode-buffered replay pushes), then one gradient update once the general
// buffer holds a full batch. Writes config.echo, metrics.csv, agent.ckpt and
// an encoder.ckpt copy into out_dir when given.
TrainOutput train_single(const env::GameSpec& game, const TrainConfig& config,
                         std::uint64_t seed, const std::string& out_dir = "");

// Runs every seed in config.seeds; artifacts land in out_dir/seed<k>/.
std::vector<RunMetrics> train(const TrainConfig& config,
                              const std::string& out_dir = "");

// Valid actions memoized by world digest (the valid set depends only on the
// world part of the state, never on steps or score).
class ValidActionCache {
 public:
  const std::vector<env::Action>& lookup(const env::GameSpec& game,
                                         const env::WorldState& state);

 private:
  std::map<std::uint64_t, std::vector<env::Action>> cache_;
};

struct EpisodeResult {
  int score = 0;
  int steps = 0;
  std::vector<env::TranscriptStep> transcript;  // filled when requested
};

// Plays one episode with softmax selection at `temperature`. Never updates
// parameters.
EpisodeResult run_episode(const env::GameSpec& game, const agent::Agent& agent,
                          double temperature, Rng& rng,
                          bool keep_transcript = false);

}  // namespace textrl::harness
