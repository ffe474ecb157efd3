#include "textrl/harness/train.hpp"

#include <filesystem>
#include <fstream>

#include "textrl/env/dsl.hpp"
#include "textrl/errors.hpp"

namespace textrl::harness {

namespace {

std::string fmt_double(double v) {
  std::string s = std::to_string(v);
  return s;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

void copy_file_to(const std::string& from, const std::string& to) {
  std::ifstream in(from, std::ios::binary);
  if (!in) throw IoError("cannot open '" + from + "'");
  std::ofstream out(to, std::ios::binary);
  if (!out) throw IoError("cannot write '" + to + "'");
  out << in.rdbuf();
}

std::shared_ptr<const lm::FrozenEncoder> load_encoder_if_needed(
    const TrainConfig& config) {
  agent::EncoderSourceSpec spec = agent::EncoderSourceSpec::parse(config.encoder);
  if (spec.kind != agent::EncoderSourceSpec::Kind::kPretrained) return nullptr;
  return std::make_shared<lm::FrozenEncoder>(lm::FrozenEncoder::load(spec.checkpoint));
}

agent::AgentBuild make_build(const TrainConfig& config, std::uint64_t seed) {
  agent::AgentBuild build;
  build.kind = config.agent;
  build.source = agent::EncoderSourceSpec::parse(config.encoder);
  build.source.pooled = config.encoder_pooled;
  build.embed_dim = config.embed_dim;
  build.hidden_dim = config.hidden_dim;
  build.grad_clip = config.grad_clip;
  build.seed = seed;
  return build;
}

}  // namespace

std::map<std::string, std::string> TrainConfig::echo() const {
  std::map<std::string, std::string> kv;
  kv["game"] = game_path;
  kv["agent"] = agent::to_string(agent);
  kv["encoder"] = encoder;
  kv["encoder-pooled"] = encoder_pooled ? "true" : "false";
  kv["envs"] = std::to_string(env_count);
  kv["steps"] = std::to_string(max_steps);
  kv["gamma"] = fmt_double(gamma);
  kv["lr"] = fmt_double(lr);
  kv["temperature"] = fmt_double(temperature);
  kv["eval-temperature"] = fmt_double(eval_temperature);
  kv["batch-size"] = std::to_string(batch_size);
  kv["eval-window"] = std::to_string(eval_window);
  kv["replay-general-cap"] = std::to_string(replay_general_cap);
  kv["replay-priority-cap"] = std::to_string(replay_priority_cap);
  kv["priority-fraction"] = fmt_double(priority_fraction);
  kv["embed-dim"] = std::to_string(embed_dim);
  kv["hidden-dim"] = std::to_string(hidden_dim);
  kv["log-every"] = std::to_string(log_every);
  kv["grad-clip"] = fmt_double(grad_clip);
  std::string seed_list;
  for (std::uint64_t s : seeds) {
    if (!seed_list.empty()) seed_list += ",";
    seed_list += std::to_string(s);
  }
  kv["seeds"] = seed_list;
  return kv;
}

const std::vector<env::Action>& ValidActionCache::lookup(const env::GameSpec& game,
                                                         const env::WorldState& state) {
  const std::uint64_t digest = env::state_hash(state);
  auto it = cache_.find(digest);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(digest, env::valid_actions(game, state)).first->second;
}

TrainOutput train_single(const env::GameSpec& game, const TrainConfig& config,
                         std::uint64_t seed, const std::string& out_dir) {
  std::shared_ptr<const lm::FrozenEncoder> encoder = load_encoder_if_needed(config);
  std::unique_ptr<agent::Agent> agent_ptr =
      agent::create_agent(game, make_build(config, seed), encoder);

  Rng master(seed);
  Rng replay_rng = master.child(2);
  std::vector<Rng> env_rngs;
  env_rngs.reserve(static_cast<std::size_t>(config.env_count));
  for (int i = 0; i < config.env_count; ++i)
    env_rngs.push_back(master.child(100 + static_cast<std::uint64_t>(i)));

  struct EnvSlot {
    env::WorldState state;
    env::Observation obs;
    std::string prev_cmd;
    std::vector<env::Action> valid;
    std::vector<agent::Transition> episode;
  };

  ValidActionCache valid_cache;
  std::vector<EnvSlot> slots(static_cast<std::size_t>(config.env_count));
  for (auto& slot : slots) {
    auto [state, obs] = env::reset(game);
    slot.state = std::move(state);
    slot.obs = std::move(obs);
    slot.prev_cmd.clear();
    slot.valid = valid_cache.lookup(game, slot.state);
  }

  agent::ReplayBuffer replay(config.replay_general_cap, config.replay_priority_cap);
  agent::UpdateConfig update_cfg;
  update_cfg.batch_size = config.batch_size;
  update_cfg.priority_fraction = config.priority_fraction;
  update_cfg.gamma = config.gamma;
  update_cfg.lr = config.lr;

  RunMetrics metrics;
  metrics.seed = seed;
  std::vector<int> episode_scores;
  int best_seen = 0;
  double max_seen = 0.0;
  double td_sum = 0.0, aux_sum = 0.0;
  long loss_count = 0;

  for (long step = 1; step <= config.max_steps; ++step) {
    for (int i = 0; i < config.env_count; ++i) {
      EnvSlot& slot = slots[static_cast<std::size_t>(i)];
      Rng& rng = env_rngs[static_cast<std::size_t>(i)];
      agent::StateParts parts = agent::state_parts(slot.obs, slot.prev_cmd);
      if (slot.valid.empty())
        throw Error("no valid action in game '" + game.game_id + "'");
      env::Action action = agent_ptr->select_action(parts, slot.valid,
                                                    config.temperature, rng);
      env::StepResult result = env::step(game, slot.state, action);
      metrics.env_interactions += 1;

      agent::Transition transition;
      transition.state_text = agent::join_state_text(parts);
      transition.action = action;
      transition.reward = result.reward;
      transition.next_state_text = agent::join_state_text(
          agent::state_parts(result.observation, action.command_text));
      transition.done = result.done;
      transition.episode_score_at_store = result.state.cumulative_score;
      if (!result.done)
        transition.next_valid_actions = valid_cache.lookup(game, result.state);
      slot.episode.push_back(std::move(transition));

      max_seen = std::max(max_seen, static_cast<double>(result.state.cumulative_score));

      if (result.done) {
        const int final_score = result.state.cumulative_score;
        for (auto& t : slot.episode) replay.push(std::move(t), final_score, best_seen);
        slot.episode.clear();
        best_seen = std::max(best_seen, final_score);
        episode_scores.push_back(final_score);
        metrics.episodes_finished += 1;
        auto [state, obs] = env::reset(game);
        slot.state = std::move(state);
        slot.obs = std::move(obs);
        slot.prev_cmd.clear();
        slot.valid = valid_cache.lookup(game, slot.state);
      } else {
        slot.state = std::move(result.state);
        slot.obs = std::move(result.observation);
        slot.prev_cmd = action.command_text;
        slot.valid = slot.episode.back().next_valid_actions;
      }
    }

    if (replay.general_size() >= static_cast<std::size_t>(config.batch_size)) {
      agent::UpdateStats stats =
          agent::agent_update(*agent_ptr, replay, update_cfg, replay_rng);
      td_sum += stats.td_loss;
      aux_sum += stats.aux_loss;
      loss_count += 1;
    }

    if (config.log_every > 0 && step % config.log_every == 0) {
      RunMetrics::Row row;
      row.step = step;
      row.episodes = metrics.episodes_finished;
      row.last100 = evaluate_last100(episode_scores);
      row.max_seen = max_seen;
      row.td_loss = loss_count > 0 ? td_sum / static_cast<double>(loss_count) : 0.0;
      row.aux_loss = loss_count > 0 ? aux_sum / static_cast<double>(loss_count) : 0.0;
      metrics.rows.push_back(row);
      td_sum = aux_sum = 0.0;
      loss_count = 0;
    }
  }

  metrics.final_last100 = evaluate_last100(episode_scores);
  metrics.final_max_seen = max_seen;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::string echo_text;
    for (const auto& [k, v] : config.echo()) echo_text += k + " = " + v + "\n";
    echo_text += "seed = " + std::to_string(seed) + "\n";
    write_text_file(out_dir + "/config.echo", echo_text);
    emit_metrics_csv(metrics, out_dir + "/metrics.csv");
    std::map<std::string, std::string> extra;
    extra["trained_steps"] = std::to_string(config.max_steps);
    extra["trained_game"] = config.game_path;
    if (encoder) {
      agent::EncoderSourceSpec spec = agent::EncoderSourceSpec::parse(config.encoder);
      copy_file_to(spec.checkpoint, out_dir + "/encoder.ckpt");
      copy_file_to(spec.checkpoint + ".vocab", out_dir + "/encoder.ckpt.vocab");
    }
    agent_ptr->save(out_dir + "/agent.ckpt", extra);
  }

  return TrainOutput{std::move(metrics), std::move(agent_ptr), std::move(encoder)};
}

std::vector<RunMetrics> train(const TrainConfig& config, const std::string& out_dir) {
  env::GameSpec game = env::load_game_file(config.game_path);
  std::vector<RunMetrics> all;
  for (std::uint64_t seed : config.seeds) {
    std::string seed_dir;
    if (!out_dir.empty()) seed_dir = out_dir + "/seed" + std::to_string(seed);
    all.push_back(train_single(game, config, seed, seed_dir).metrics);
  }
  return all;
}

EpisodeResult run_episode(const env::GameSpec& game, const agent::Agent& agent,
                          double temperature, Rng& rng, bool keep_transcript) {
  ValidActionCache cache;
  EpisodeResult result;
  auto [state, obs] = env::reset(game);
  std::string prev_cmd;
  while (!state.done) {
    const std::vector<env::Action>& valid = cache.lookup(game, state);
    if (valid.empty()) throw Error("no valid action in game '" + game.game_id + "'");
    agent::StateParts parts = agent::state_parts(obs, prev_cmd);
    env::Action action = agent.select_action(parts, valid, temperature, rng);
    env::StepResult step = env::step(game, state, action);
    result.steps += 1;
    if (keep_transcript) {
      env::TranscriptStep ts;
      ts.observation = obs;
      ts.actions = valid;
      ts.q_values = agent.q_values(parts, valid);
      ts.chosen = action;
      ts.reward = step.reward;
      ts.score = step.state.cumulative_score;
      ts.done = step.done;
      result.transcript.push_back(std::move(ts));
    }
    state = std::move(step.state);
    obs = std::move(step.observation);
    prev_cmd = action.command_text;
  }
  result.score = state.cumulative_score;
  return result;
}

}  // namespace textrl::harness
