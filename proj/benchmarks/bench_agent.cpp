#include <benchmark/benchmark.h>

#include "textrl/agent/drrn.hpp"
#include "textrl/env/dsl.hpp"
#include "textrl/env/engine.hpp"
#include "textrl/harness/train.hpp"

namespace {

using namespace textrl;

const env::GameSpec& treasure_house() {
  static env::GameSpec game =
      env::load_game_file(std::string(TEXTRL_GAMES_DIR) + "/treasure_house.toy");
  return game;
}

std::unique_ptr<agent::Agent> make_drrn() {
  agent::AgentBuild build;
  build.kind = agent::AgentKind::kDrrn;
  build.seed = 3;
  return agent::create_agent(treasure_house(), build, nullptr);
}

void BM_DrrnQValues(benchmark::State& state) {
  const env::GameSpec& game = treasure_house();
  auto agent_ptr = make_drrn();
  auto [world, obs] = env::reset(game);
  std::vector<env::Action> valid = env::valid_actions(game, world);
  agent::StateParts parts = agent::state_parts(obs, "");
  for (auto _ : state) {
    auto q = agent_ptr->q_values(parts, valid);
    benchmark::DoNotOptimize(q[0]);
  }
}
BENCHMARK(BM_DrrnQValues);

void BM_DrrnUpdate(benchmark::State& state) {
  const env::GameSpec& game = treasure_house();
  auto agent_ptr = make_drrn();
  agent::ReplayBuffer buffer(4096, 1024);
  Rng rng(11);
  harness::ValidActionCache cache;
  auto [world, obs] = env::reset(game);
  std::string prev;
  std::vector<agent::Transition> episode;
  while (buffer.general_size() < 512) {
    const auto& valid = cache.lookup(game, world);
    const env::Action& action = valid[rng.uniform_int(valid.size())];
    env::StepResult r = env::step(game, world, action);
    agent::Transition t;
    t.state_text = agent::join_state_text(agent::state_parts(obs, prev));
    t.action = action;
    t.reward = r.reward;
    t.next_state_text = agent::join_state_text(
        agent::state_parts(r.observation, action.command_text));
    if (!r.done) t.next_valid_actions = cache.lookup(game, r.state);
    t.done = r.done;
    episode.push_back(t);
    if (r.done) {
      for (auto& tr : episode) buffer.push(std::move(tr), r.state.cumulative_score, 0);
      episode.clear();
      auto fresh = env::reset(game);
      world = std::move(fresh.first);
      obs = std::move(fresh.second);
      prev.clear();
    } else {
      world = std::move(r.state);
      obs = std::move(r.observation);
      prev = action.command_text;
    }
  }
  agent::UpdateConfig cfg;
  cfg.lr = 1e-3;
  Rng sample_rng(5);
  for (auto _ : state) {
    auto stats = agent::agent_update(*agent_ptr, buffer, cfg, sample_rng);
    benchmark::DoNotOptimize(stats.td_loss);
  }
}
BENCHMARK(BM_DrrnUpdate);

}  // namespace
