#include "textrl/harness/corpus_gen.hpp"

#include <stdexcept>

#include "textrl/env/dsl.hpp"
#include "textrl/harness/oracle.hpp"
#include "textrl/harness/train.hpp"
#include "textrl/rng.hpp"

namespace textrl::harness {

namespace {

void append_pair(std::string& out, const env::Observation& obs,
                 const env::Action& action) {
  out += env::render_state_text(obs);
  out += '\t';
  out += action.command_text;
  out += '\n';
}

// One uniform random walk episode; returns emitted pair count.
std::size_t random_episode(const env::GameSpec& game, ValidActionCache& cache,
                           Rng& rng, std::string& out, std::size_t budget) {
  std::size_t emitted = 0;
  auto [state, obs] = env::reset(game);
  while (!state.done && emitted < budget) {
    const auto& valid = cache.lookup(game, state);
    if (valid.empty()) break;
    const env::Action& action = valid[rng.uniform_int(valid.size())];
    append_pair(out, obs, action);
    ++emitted;
    env::StepResult result = env::step(game, state, action);
    state = std::move(result.state);
    obs = std::move(result.observation);
  }
  return emitted;
}

std::size_t optimal_episode(const env::GameSpec& game,
                            const std::vector<env::Action>& sequence,
                            std::string& out, std::size_t budget) {
  std::size_t emitted = 0;
  auto [state, obs] = env::reset(game);
  for (const env::Action& action : sequence) {
    if (state.done || emitted >= budget) break;
    append_pair(out, obs, action);
    ++emitted;
    env::StepResult result = env::step(game, state, action);
    state = std::move(result.state);
    obs = std::move(result.observation);
  }
  return emitted;
}

}  // namespace

std::string generate_corpus(const CorpusGenConfig& config) {
  if (config.game_paths.empty())
    throw std::invalid_argument("generate_corpus: no games given");

  struct GameEntry {
    env::GameSpec game;
    std::vector<env::Action> optimal;
    ValidActionCache cache;
  };
  std::vector<GameEntry> games;
  for (const auto& path : config.game_paths) {
    GameEntry entry;
    entry.game = env::load_game_file(path);
    entry.optimal = tabular_oracle(entry.game, 0.9).optimal_sequence;
    games.push_back(std::move(entry));
  }

  Rng rng(config.seed);
  std::string out;
  std::size_t emitted = 0;
  int episode_counter = 0;
  while (emitted < config.pairs) {
    GameEntry& entry = games[static_cast<std::size_t>(episode_counter) % games.size()];
    const std::size_t budget = config.pairs - emitted;
    const bool optimal_turn =
        (episode_counter / static_cast<int>(games.size())) %
            (config.random_per_optimal + 1) ==
        config.random_per_optimal;
    if (optimal_turn) {
      emitted += optimal_episode(entry.game, entry.optimal, out, budget);
    } else {
      emitted += random_episode(entry.game, entry.cache, rng, out, budget);
    }
    ++episode_counter;
  }
  return out;
}

}  // namespace textrl::harness
