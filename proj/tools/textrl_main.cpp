// textrl: value-based RL agents for miniature text-adventure games.
//
// Subcommands: gen-corpus, pretrain, train, eval, transfer, ablate, oracle,
// play. Exit codes: 0 success, 2 usage, 3 input format, 4 runtime failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "textrl/env/dsl.hpp"
#include "textrl/env/engine.hpp"
#include "textrl/env/transcript.hpp"
#include "textrl/errors.hpp"
#include "textrl/harness/ablation.hpp"
#include "textrl/harness/corpus_gen.hpp"
#include "textrl/harness/oracle.hpp"
#include "textrl/harness/train.hpp"
#include "textrl/harness/transfer.hpp"
#include "textrl/lm/pretrain.hpp"

namespace {

using namespace textrl;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

struct TrainArgs {
  harness::TrainConfig config;
  std::string out_dir;
  int transcripts = 0;
};

void add_train_flags(CLI::App* cmd, harness::TrainConfig& cfg,
                     std::string& agent_name) {
  cmd->add_option("--game", cfg.game_path, "game definition file")->required();
  cmd->add_option("--agent", agent_name, "agent kind: drrn | tdqn");
  cmd->add_option("--encoder", cfg.encoder,
                  "encoder source: scratch | bow | checkpoint path");
  cmd->add_flag("--encoder-pooled", cfg.encoder_pooled,
                "feed only the pooled [CLS] vector");
  cmd->add_option("--envs", cfg.env_count, "parallel environment instances");
  cmd->add_option("--steps", cfg.max_steps, "global training steps");
  cmd->add_option("--gamma", cfg.gamma, "discount factor");
  cmd->add_option("--lr", cfg.lr, "learning rate");
  cmd->add_option("--temperature", cfg.temperature, "softmax exploration temperature");
  cmd->add_option("--eval-temperature", cfg.eval_temperature,
                  "near-greedy evaluation temperature");
  cmd->add_option("--seed", cfg.seeds, "run seeds")->delimiter(',');
  cmd->add_option("--batch-size", cfg.batch_size, "replay batch size");
  cmd->add_option("--replay-general-cap", cfg.replay_general_cap,
                  "general replay capacity");
  cmd->add_option("--replay-priority-cap", cfg.replay_priority_cap,
                  "priority replay capacity");
  cmd->add_option("--priority-fraction", cfg.priority_fraction,
                  "fraction of each batch from the priority buffer");
  cmd->add_option("--embed-dim", cfg.embed_dim, "token embedding width");
  cmd->add_option("--hidden-dim", cfg.hidden_dim, "GRU hidden width");
  cmd->add_option("--log-every", cfg.log_every, "steps between metric rows");
  cmd->add_option("--grad-clip", cfg.grad_clip, "global gradient norm clip");
}

int cmd_gen_corpus(const std::vector<std::string>& games, const std::string& out,
                   std::size_t pairs, std::uint64_t seed) {
  harness::CorpusGenConfig cfg;
  cfg.game_paths = games;
  cfg.pairs = pairs;
  cfg.seed = seed;
  std::string text = harness::generate_corpus(cfg);
  write_file(out, text);
  std::size_t lines = static_cast<std::size_t>(
      std::count(text.begin(), text.end(), '\n'));
  std::cout << "wrote " << lines << " pairs to " << out << "\n";
  return 0;
}

int cmd_pretrain(const std::string& corpus_path, const std::string& out,
                 const lm::PretrainConfig& cfg) {
  corpus::Corpus corpus = corpus::ingest_transcripts_file(corpus_path);
  lm::PretrainResult result = lm::pretrain(corpus, cfg);
  result.encoder.save(out);
  corpus::Corpus heldout = lm::heldout_split(corpus).second;
  std::cout << "pretrained on " << corpus.size() << " pairs, vocab "
            << result.encoder.vocab().size() << "\n";
  if (!result.loss_history.empty()) {
    std::cout << "first batch loss " << result.loss_history.front()
              << ", last batch loss " << result.loss_history.back() << "\n";
  }
  if (!heldout.empty()) {
    std::cout << "heldout masked cross-entropy "
              << lm::heldout_masked_ce(result.encoder, heldout, cfg) << "\n";
  }
  std::cout << "encoder fingerprint " << std::hex << result.encoder.fingerprint()
            << std::dec << "\n";
  return 0;
}

int cmd_train(const TrainArgs& args) {
  env::GameSpec game = env::load_game_file(args.config.game_path);
  std::vector<harness::RunMetrics> runs;
  for (std::uint64_t seed : args.config.seeds) {
    std::string dir;
    if (!args.out_dir.empty()) dir = args.out_dir + "/seed" + std::to_string(seed);
    harness::TrainOutput out = harness::train_single(game, args.config, seed, dir);
    std::cout << "seed " << seed << ": last100 " << out.metrics.final_last100
              << " max_seen " << out.metrics.final_max_seen << " episodes "
              << out.metrics.episodes_finished << "\n";
    if (args.transcripts > 0 && !dir.empty()) {
      std::filesystem::create_directories(dir + "/transcripts");
      Rng rng = Rng(seed).child(9);
      for (int i = 0; i < args.transcripts; ++i) {
        harness::EpisodeResult ep = harness::run_episode(
            game, *out.agent, args.config.eval_temperature, rng, true);
        write_file(dir + "/transcripts/episode" + std::to_string(i) + ".txt",
                   env::record_transcript(ep.transcript));
      }
    }
    runs.push_back(std::move(out.metrics));
  }
  harness::Aggregate agg = harness::aggregate_runs(runs);
  std::cout << "final raw score " << agg.final_score << ", average max seen "
            << agg.max_seen << "\n";
  return 0;
}

int cmd_eval(const std::string& agent_path, const std::string& game_path,
             int episodes, double temperature, std::uint64_t seed,
             const std::string& transcript_out) {
  env::GameSpec game = env::load_game_file(game_path);
  agent::LoadedAgent loaded = agent::load_agent(agent_path, game);
  Rng rng = Rng(seed).child(3);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    total += harness::run_episode(game, *loaded.agent, temperature, rng).score;
  }
  std::cout << "average score: " << (episodes > 0 ? total / episodes : 0.0)
            << " over " << episodes << " episodes\n";
  if (!transcript_out.empty()) {
    harness::EpisodeResult ep =
        harness::run_episode(game, *loaded.agent, temperature, rng, true);
    write_file(transcript_out, env::record_transcript(ep.transcript));
    std::cout << "wrote transcript to " << transcript_out << "\n";
  }
  return 0;
}

int cmd_transfer(const std::string& agent_path, const std::string& game_path,
                 int episodes, double temperature, std::uint64_t seed) {
  env::GameSpec game = env::load_game_file(game_path);
  harness::TransferResult result = harness::transfer_eval_checkpoint(
      agent_path, game, episodes, temperature, seed);
  std::cout << "average episode score: " << result.average_score << " over "
            << result.episodes << " episodes\n";
  std::cout << "parameters unchanged: "
            << (result.fingerprint_unchanged ? "yes" : "NO") << "\n";
  return result.fingerprint_unchanged ? 0 : 4;
}

int cmd_ablate(const harness::TrainConfig& base, const std::string& encoder,
               const std::string& baseline, const std::string& out_dir) {
  harness::TrainConfig arm_a = base;
  arm_a.encoder = encoder;
  harness::TrainConfig arm_b = base;
  arm_b.encoder = baseline;
  harness::AblationReport report = harness::ablation(arm_a, arm_b, out_dir);
  std::cout << report.to_text();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/report.txt", report.to_text());
  }
  return 0;
}

int cmd_oracle(const std::string& game_path, double gamma) {
  env::GameSpec game = env::load_game_file(game_path);
  harness::OracleResult result = harness::tabular_oracle(game, gamma);
  std::cout << "optimal return: " << result.optimal_return << "\n";
  std::cout << "optimal length: " << result.optimal_sequence.size() << "\n";
  std::cout << "states: " << result.state_count << "\n";
  std::cout << "sequence:";
  for (const auto& action : result.optimal_sequence)
    std::cout << " [" << action.command_text << "]";
  std::cout << "\n";
  return 0;
}

int cmd_play(const std::string& game_path) {
  env::GameSpec game = env::load_game_file(game_path);
  auto [state, obs] = env::reset(game);
  std::cout << env::render_state_text(obs) << "\n";
  std::string line;
  while (!state.done && std::cout << "> " && std::getline(std::cin, line)) {
    if (line == "quit" || line == "q") break;
    if (line == "valid") {
      for (const auto& a : env::valid_actions(game, state))
        std::cout << "  " << a.command_text << "\n";
      continue;
    }
    auto action = env::parse_command(game, line);
    if (!action) {
      std::cout << "nothing happens (no template matches that command)\n";
      continue;
    }
    env::StepResult result = env::step(game, state, *action);
    state = std::move(result.state);
    std::cout << env::render_state_text(result.observation) << "\n";
    std::cout << "reward " << result.reward << ", score "
              << state.cumulative_score << ", steps " << state.steps_taken << "\n";
  }
  if (state.done)
    std::cout << "episode over, score " << state.cumulative_score << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value-based RL agents for miniature text-adventure games"};
  app.require_subcommand(1);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "emit a synthetic transcript corpus");
  std::vector<std::string> gen_games;
  std::string gen_out = "corpus.tsv";
  std::size_t gen_pairs = 5000;
  std::uint64_t gen_seed = 7;
  gen->add_option("--games", gen_games, "game files to walk")->required()->delimiter(',');
  gen->add_option("--out", gen_out, "output TSV path");
  gen->add_option("--pairs", gen_pairs, "pair count");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->set_config("--config");

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "masked-language-model pretraining");
  std::string pre_corpus, pre_out = "encoder.ckpt";
  lm::PretrainConfig pre_cfg;
  pre->add_option("--corpus", pre_corpus, "transcript corpus TSV")->required();
  pre->add_option("--out", pre_out, "encoder checkpoint path");
  pre->add_option("--epochs", pre_cfg.epochs, "training epochs");
  pre->add_option("--batch-size", pre_cfg.batch_size, "batch size");
  pre->add_option("--mask-rate", pre_cfg.mask_rate, "masking rate");
  pre->add_option("--max-len", pre_cfg.max_len, "maximum sequence length");
  pre->add_option("--lr", pre_cfg.lr, "learning rate");
  pre->add_option("--seed", pre_cfg.seed, "init/shuffle seed");
  pre->add_option("--vocab-size", pre_cfg.vocab_max, "vocabulary cap");
  pre->add_option("--layers", pre_cfg.layers, "encoder layers");
  pre->add_option("--dim", pre_cfg.d_model, "model width");
  pre->add_option("--heads", pre_cfg.heads, "attention heads");
  pre->set_config("--config");

  // train
  auto* tr = app.add_subcommand("train", "train an agent");
  TrainArgs train_args;
  std::string train_agent_name = "drrn";
  add_train_flags(tr, train_args.config, train_agent_name);
  tr->add_option("--out", train_args.out_dir, "run directory");
  tr->add_option("--record-transcripts", train_args.transcripts,
                 "greedy episode transcripts to record per seed");
  tr->set_config("--config");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a trained agent");
  std::string eval_agent, eval_game, eval_transcript;
  int eval_episodes = 100;
  double eval_temp = 0.01;
  std::uint64_t eval_seed = 1;
  ev->add_option("--agent", eval_agent, "agent checkpoint")->required();
  ev->add_option("--game", eval_game, "game definition file")->required();
  ev->add_option("--episodes", eval_episodes, "episode count");
  ev->add_option("--temperature", eval_temp, "selection temperature");
  ev->add_option("--seed", eval_seed, "evaluation seed");
  ev->add_option("--transcript", eval_transcript, "write one episode transcript here");
  ev->set_config("--config");

  // transfer
  auto* tf = app.add_subcommand("transfer", "zero-shot evaluation on another game");
  std::string tf_agent, tf_game;
  int tf_episodes = 300;
  double tf_temp = 0.01;
  std::uint64_t tf_seed = 1;
  tf->add_option("--agent", tf_agent, "agent checkpoint")->required();
  tf->add_option("--game", tf_game, "target game definition file")->required();
  tf->add_option("--episodes", tf_episodes, "episode count");
  tf->add_option("--temperature", tf_temp, "selection temperature");
  tf->add_option("--seed", tf_seed, "evaluation seed");
  tf->set_config("--config");

  // ablate
  auto* ab = app.add_subcommand("ablate", "paired encoder ablation");
  harness::TrainConfig ab_cfg;
  std::string ab_agent_name = "drrn";
  std::string ab_encoder, ab_baseline = "scratch", ab_out;
  add_train_flags(ab, ab_cfg, ab_agent_name);
  ab->get_option("--encoder")->required();
  ab->add_option("--baseline", ab_baseline, "second arm source: scratch | bow");
  ab->add_option("--out", ab_out, "report/curves directory");
  ab->set_config("--config");

  // oracle
  auto* orc = app.add_subcommand("oracle", "tabular value-iteration oracle");
  std::string orc_game;
  double orc_gamma = 0.9;
  orc->add_option("--game", orc_game, "game definition file")->required();
  orc->add_option("--gamma", orc_gamma, "discount factor");
  orc->set_config("--config");

  // play
  auto* pl = app.add_subcommand("play", "interactive episode on the terminal");
  std::string pl_game;
  pl->add_option("--game", pl_game, "game definition file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_corpus(gen_games, gen_out, gen_pairs, gen_seed);
    if (pre->parsed()) return cmd_pretrain(pre_corpus, pre_out, pre_cfg);
    if (tr->parsed()) {
      train_args.config.agent = agent::agent_kind_from_string(train_agent_name);
      return cmd_train(train_args);
    }
    if (ev->parsed())
      return cmd_eval(eval_agent, eval_game, eval_episodes, eval_temp, eval_seed,
                      eval_transcript);
    if (tf->parsed())
      return cmd_transfer(tf_agent, tf_game, tf_episodes, tf_temp, tf_seed);
    if (ab->parsed()) {
      ab_cfg.agent = agent::agent_kind_from_string(ab_agent_name);
      std::string encoder = ab_cfg.encoder;  // --encoder names the pretrained arm
      ab_cfg.encoder = "scratch";
      return cmd_ablate(ab_cfg, encoder, ab_baseline, ab_out);
    }
    if (orc->parsed()) return cmd_oracle(orc_game, orc_gamma);
    if (pl->parsed()) return cmd_play(pl_game);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
