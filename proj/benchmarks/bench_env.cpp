#include <benchmark/benchmark.h>

#include "textrl/env/dsl.hpp"
#include "textrl/env/engine.hpp"

namespace {

using namespace textrl;

const env::GameSpec& treasure_house() {
  static env::GameSpec game =
      env::load_game_file(std::string(TEXTRL_GAMES_DIR) + "/treasure_house.toy");
  return game;
}

void BM_EnvStep(benchmark::State& state) {
  const env::GameSpec& game = treasure_house();
  auto [world, obs] = env::reset(game);
  env::Action east = *env::parse_command(game, "go east");
  env::Action west = *env::parse_command(game, "go west");
  bool flip = false;
  for (auto _ : state) {
    env::StepResult r = env::step(game, world, flip ? west : east);
    benchmark::DoNotOptimize(r.state.steps_taken);
    flip = !flip;
    if (r.state.done) {
      auto fresh = env::reset(game);
      world = std::move(fresh.first);
    }
  }
}
BENCHMARK(BM_EnvStep);

void BM_ValidActions(benchmark::State& state) {
  const env::GameSpec& game = treasure_house();
  auto [world, obs] = env::reset(game);
  for (auto _ : state) {
    auto valid = env::valid_actions(game, world);
    benchmark::DoNotOptimize(valid.size());
  }
}
BENCHMARK(BM_ValidActions);

void BM_StateHash(benchmark::State& state) {
  const env::GameSpec& game = treasure_house();
  auto [world, obs] = env::reset(game);
  for (auto _ : state) {
    benchmark::DoNotOptimize(env::state_hash(world));
  }
}
BENCHMARK(BM_StateHash);

}  // namespace
