#include <doctest.h>

#include <set>

#include "textrl/env/dsl.hpp"
#include "textrl/env/engine.hpp"
#include "textrl/env/transcript.hpp"
#include "textrl/errors.hpp"
#include "textrl/rng.hpp"

using namespace textrl;

namespace {

std::string games_dir() { return TEXTRL_GAMES_DIR; }

env::GameSpec tworoom() { return env::load_game_file(games_dir() + "/tworoom.toy"); }
env::GameSpec treasure() {
  return env::load_game_file(games_dir() + "/treasure_house.toy");
}

env::Action command(const env::GameSpec& game, const std::string& text) {
  auto action = env::parse_command(game, text);
  REQUIRE(action.has_value());
  return *action;
}

// Independent candidate count: sum over templates of fillers^blanks.
std::size_t counted_candidates(const env::GameSpec& game) {
  std::size_t total = 0;
  for (const auto& tmpl : game.templates) {
    std::size_t n = 1;
    for (int b = 0; b < tmpl.blank_count; ++b) n *= game.filler_vocab.size();
    total += n;
  }
  return total;
}

std::set<std::string> command_set(const std::vector<env::Action>& actions) {
  std::set<std::string> out;
  for (const auto& a : actions) out.insert(a.command_text);
  return out;
}

}  // namespace

TEST_CASE("load_game parses the bundled tworoom spec") {
  env::GameSpec game = tworoom();
  CHECK(game.rooms.size() == 2);
  CHECK(game.objects.size() == 1);
  CHECK(game.max_score() == 5);
  CHECK(game.start_room == "room-a");
  CHECK(game.episode_cap == 12);
}

TEST_CASE("load_game parses the bundled treasure-house spec") {
  env::GameSpec game = treasure();
  CHECK(game.rooms.size() == 5);
  CHECK(game.reward_events.size() == 3);
  int total = 0;
  for (const auto& ev : game.reward_events) total += ev.points;
  CHECK(total == 10);
}

TEST_CASE("load_game rejects dangling references") {
  const char* bad =
      "[meta]\nstart: a\ncap: 5\n"
      "[room a]\nname: a\ndesc: a room.\nexit: east nowhere-room\n"
      "[template] look\n[fillers] east\n";
  CHECK_THROWS_AS(env::load_game(bad), ValidationError);
}

TEST_CASE("load_game rejects malformed lines with their line number") {
  try {
    env::load_game("[room a]\nname missing colon\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("load_game rejects an unknown start room") {
  const char* bad =
      "[meta]\nstart: nowhere\ncap: 5\n"
      "[room a]\nname: a\ndesc: a room.\n"
      "[template] look\n[fillers] east\n";
  CHECK_THROWS_AS(env::load_game(bad), ValidationError);
}

TEST_CASE("reset puts the tworoom player at the start with the coin east") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  CHECK(state.player_room == "room-a");
  CHECK(state.object_locations.at("coin") == "room-b");
  CHECK(state.cumulative_score == 0);
  CHECK(state.steps_taken == 0);
  CHECK_FALSE(state.done);
  CHECK_FALSE(obs.event_text.empty());
  CHECK_FALSE(obs.inventory_text.empty());
  CHECK_FALSE(obs.look_text.empty());
}

TEST_CASE("reset is deterministic") {
  env::GameSpec game = tworoom();
  auto [s1, o1] = env::reset(game);
  auto [s2, o2] = env::reset(game);
  CHECK(env::state_hash(s1) == env::state_hash(s2));
  CHECK(o1.event_text == o2.event_text);
  CHECK(o1.inventory_text == o2.inventory_text);
  CHECK(o1.look_text == o2.look_text);
}

TEST_CASE("reset reports an empty inventory on treasure-house") {
  env::GameSpec game = treasure();
  auto [state, obs] = env::reset(game);
  CHECK(obs.inventory_text == "you are empty handed.");
}

TEST_CASE("step moves the player east in tworoom") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  env::StepResult r = env::step(game, state, command(game, "go east"));
  CHECK(r.state.player_room == "room-b");
  CHECK(r.reward == 0);
  CHECK_FALSE(r.done);
  CHECK(r.state.steps_taken == 1);
}

TEST_CASE("taking the coin pays five points and ends the episode") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  env::StepResult at_b = env::step(game, state, command(game, "go east"));
  env::StepResult done = env::step(game, at_b.state, command(game, "take coin"));
  CHECK(done.state.object_locations.at("coin") == env::kInventory);
  CHECK(done.reward == 5);
  CHECK(done.done);
  CHECK(done.state.cumulative_score == 5);
}

TEST_CASE("commands without effect consume a step and report nothing happens") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  const std::uint64_t before = env::state_hash(state);
  env::StepResult r = env::step(game, state, command(game, "go north"));
  CHECK(r.reward == 0);
  CHECK(r.observation.event_text == "nothing happens");
  CHECK(env::state_hash(r.state) == before);
  CHECK(r.state.steps_taken == 1);
}

TEST_CASE("stepping a finished episode throws") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  state.done = true;
  CHECK_THROWS_AS(env::step(game, state, command(game, "go east")),
                  SteppedAfterDone);
}

TEST_CASE("step is deterministic on copies") {
  env::GameSpec game = treasure();
  auto [state, obs] = env::reset(game);
  env::Action east = command(game, "go east");
  env::StepResult a = env::step(game, state, east);
  env::StepResult b = env::step(game, state, east);
  CHECK(env::state_hash(a.state) == env::state_hash(b.state));
  CHECK(a.reward == b.reward);
  CHECK(a.observation.event_text == b.observation.event_text);
}

TEST_CASE("candidate enumeration is the full cross product") {
  const char* text =
      "[meta]\nstart: a\ncap: 5\n"
      "[room a]\nname: a\ndesc: a room.\n"
      "[template] look\n"
      "[template] take OBJ1\n"
      "[template] put OBJ1 in OBJ2\n"
      "[fillers] w x y z\n";
  env::GameSpec game = env::load_game(text);
  std::vector<env::Action> candidates = env::enumerate_candidate_actions(game);
  CHECK(candidates.size() == 1 + 4 + 16);
  CHECK(candidates.size() == counted_candidates(game));
}

TEST_CASE("candidate order is stable across calls") {
  env::GameSpec game = treasure();
  auto a = env::enumerate_candidate_actions(game);
  auto b = env::enumerate_candidate_actions(game);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].command_text == b[i].command_text);
    CHECK(a[i].template_id == b[i].template_id);
  }
}

TEST_CASE("tworoom enumerates eleven candidates") {
  env::GameSpec game = tworoom();
  std::vector<env::Action> candidates = env::enumerate_candidate_actions(game);
  CHECK(candidates.size() == 11);
  CHECK(counted_candidates(game) == 11);
}

TEST_CASE("valid actions at the tworoom start are exactly go east") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  auto valid = env::valid_actions(game, state);
  CHECK(command_set(valid) == std::set<std::string>{"go east"});
}

TEST_CASE("valid actions beside the coin are go west and take coin") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  env::StepResult at_b = env::step(game, state, command(game, "go east"));
  auto valid = env::valid_actions(game, at_b.state);
  CHECK(command_set(valid) == std::set<std::string>{"go west", "take coin"});
}

TEST_CASE("valid actions are a subset of the candidates, sound and complete") {
  env::GameSpec game = treasure();
  auto [state, obs] = env::reset(game);
  Rng rng(17);
  std::vector<env::Action> candidates = env::enumerate_candidate_actions(game);
  for (int walk = 0; walk < 40 && !state.done; ++walk) {
    auto valid = env::valid_actions(game, state);
    std::set<std::string> valid_set = command_set(valid);
    const std::uint64_t digest = env::state_hash(state);
    for (const auto& candidate : candidates) {
      env::StepResult probe = env::step(game, state, candidate);
      const bool changes =
          probe.reward != 0 || env::state_hash(probe.state) != digest;
      CHECK(valid_set.count(candidate.command_text) == (changes ? 1u : 0u));
    }
    // Probing never advanced the live episode.
    CHECK(env::state_hash(state) == digest);
    const env::Action& next = valid[rng.uniform_int(valid.size())];
    env::StepResult r = env::step(game, state, next);
    state = r.state;
  }
}

TEST_CASE("probing purity: valid_actions leaves the state untouched") {
  env::GameSpec game = treasure();
  auto [state, obs] = env::reset(game);
  const std::uint64_t digest = env::state_hash(state);
  const int steps = state.steps_taken;
  (void)env::valid_actions(game, state);
  CHECK(env::state_hash(state) == digest);
  CHECK(state.steps_taken == steps);
}

TEST_CASE("render_state_text joins the three parts with one separator") {
  env::Observation obs{"taken.", "you carry: coin", "Room B. a room."};
  CHECK(env::render_state_text(obs) == "taken. | you carry: coin | Room B. a room.");
  CHECK(env::render_state_text(obs) == env::render_state_text(obs));

  std::string text = env::render_state_text(obs);
  std::size_t separators = 0;
  for (std::size_t pos = 0; (pos = text.find(" | ", pos)) != std::string::npos;
       pos += 3)
    ++separators;
  CHECK(separators == 2);
}

TEST_CASE("state_hash covers the world and ignores step counters") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  env::WorldState copy = state;
  CHECK(env::state_hash(state) == env::state_hash(copy));

  copy.player_room = "room-b";
  CHECK(env::state_hash(state) != env::state_hash(copy));

  env::WorldState timed = state;
  timed.steps_taken += 3;
  timed.cumulative_score += 2;
  CHECK(env::state_hash(state) == env::state_hash(timed));
}

TEST_CASE("reward accounting: cumulative score equals the sum of step rewards") {
  env::GameSpec game = treasure();
  auto [state, obs] = env::reset(game);
  Rng rng(23);
  int total = 0;
  while (!state.done) {
    auto valid = env::valid_actions(game, state);
    env::StepResult r =
        env::step(game, state, valid[rng.uniform_int(valid.size())]);
    total += r.reward;
    state = r.state;
    CHECK(state.cumulative_score == total);
  }
}

TEST_CASE("once events pay at most once per episode") {
  env::GameSpec game = treasure();
  auto [state, obs] = env::reset(game);
  auto play = [&](const std::string& text) {
    env::StepResult r = env::step(game, state, command(game, text));
    state = r.state;
    return r.reward;
  };
  CHECK(play("go east") == 0);
  CHECK(play("go east") == 0);
  CHECK(play("take key") == 2);
  CHECK(play("drop key") == 0);
  CHECK(play("take key") == 0);  // once event already fired
  CHECK(state.cumulative_score == 2);
}

TEST_CASE("the episode cap forces done") {
  env::GameSpec game = tworoom();
  auto [state, obs] = env::reset(game);
  env::Action east = command(game, "go east");
  env::Action west = command(game, "go west");
  bool to_east = true;
  while (!state.done) {
    env::StepResult r = env::step(game, state, to_east ? east : west);
    state = r.state;
    to_east = !to_east;
    CHECK(state.steps_taken <= game.episode_cap);
  }
  CHECK(state.steps_taken == game.episode_cap);
}

TEST_CASE("parse_command normalizes case and whitespace") {
  env::GameSpec game = tworoom();
  auto action = env::parse_command(game, "  Go   EAST ");
  REQUIRE(action.has_value());
  CHECK(action->command_text == "go east");
  CHECK_FALSE(env::parse_command(game, "dance wildly").has_value());
}

TEST_CASE("transcripts have one STATE block per step") {
  env::Observation obs{"a.", "b.", "c."};
  env::Action chosen{0, std::nullopt, std::nullopt, "look"};
  env::TranscriptStep step{obs, {chosen}, {1.2345}, chosen, 0, 0, false};
  std::string text = env::record_transcript({step});
  CHECK(text.find("STATE 0") == 0);
  CHECK(text.find("STATE 1") == std::string::npos);
}

TEST_CASE("transcript q-values round to two decimals") {
  env::Observation obs{"a.", "b.", "c."};
  env::Action chosen{0, std::nullopt, std::nullopt, "look"};
  env::TranscriptStep step{obs, {chosen}, {9.0733}, chosen, 0, 0, false};
  std::string text = env::record_transcript({step});
  CHECK(text.find("[9.07]") != std::string::npos);
}

TEST_CASE("the optimal treasure-house transcript ends at score ten") {
  env::GameSpec game = treasure();
  const std::vector<std::string> optimal = {
      "go east", "go east",  "take key", "go west",      "go west",
      "go west", "unlock chest with key", "go west",      "take treasure"};
  auto [state, obs] = env::reset(game);
  std::vector<env::TranscriptStep> episode;
  for (const auto& cmd : optimal) {
    env::Action action = command(game, cmd);
    env::StepResult r = env::step(game, state, action);
    env::TranscriptStep ts;
    ts.observation = obs;
    ts.actions = {action};
    ts.q_values = {0.0};
    ts.chosen = action;
    ts.reward = r.reward;
    ts.score = r.state.cumulative_score;
    ts.done = r.done;
    episode.push_back(ts);
    state = r.state;
    obs = r.observation;
  }
  CHECK(state.done);
  CHECK(state.cumulative_score == 10);
  std::string text = env::record_transcript(episode);
  CHECK(text.find("Score 10, Done True") != std::string::npos);
  // The last block is the terminal one.
  CHECK(text.rfind("Score 10, Done True\n") == text.size() - 20);
}

TEST_CASE("game lexicon covers every word the engine can emit") {
  env::GameSpec game = treasure();
  auto lexicon = env::game_lexicon(game);
  CHECK_FALSE(lexicon.empty());
  bool has_nothing = false;
  for (const auto& entry : lexicon) {
    if (entry == "nothing happens") has_nothing = true;
  }
  CHECK(has_nothing);
}
