#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "textrl/env/game.hpp"

namespace textrl::env {

struct StepResult {
  WorldState state;
  Observation observation;
  int reward = 0;
  bool done = false;
};

// Initial state and observation. Deterministic; no hidden randomness.
std::pair<WorldState, Observation> reset(const GameSpec& game);

// Applies one action. Invalid commands leave the world unchanged except for
// steps_taken and report "nothing happens". Throws SteppedAfterDone if the
// episode already ended.
StepResult step(const GameSpec& game, const WorldState& state, const Action& action);

// Full cross product templates x fillers^blank_count, template-major, then
// filler1, then filler2. Stable across calls.
std::vector<Action> enumerate_candidate_actions(const GameSpec& game);

// Subset of the candidates that change the state digest or pay reward when
// probed against a copy of `state`. Order follows the candidate order.
std::vector<Action> valid_actions(const GameSpec& game, const WorldState& state);

// event | inventory | look joined with " | ".
std::string render_state_text(const Observation& obs);

// 64-bit digest over player room, object locations and fired events.
// steps_taken and score are excluded so pure time passage does not count as
// a world change.
std::uint64_t state_hash(const WorldState& state);

// Builds the action whose command text is `text` after lowercasing and
// whitespace normalization, if any template/filler combination produces it.
std::optional<Action> parse_command(const GameSpec& game, const std::string& text);

// Every text fragment the engine can ever emit for this game, plus command
// vocabulary. Used to build token vocabularies without sampling.
std::vector<std::string> game_lexicon(const GameSpec& game);

}  // namespace textrl::env
