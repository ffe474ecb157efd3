#pragma once

#include <string>
#include <vector>

#include "textrl/env/game.hpp"

namespace textrl::env {

struct TranscriptStep {
  Observation observation;
  std::vector<Action> actions;
  std::vector<double> q_values;
  Action chosen;
  int reward = 0;
  int score = 0;
  bool done = false;
};

// Human-readable episode dump: one STATE block per step with the state text,
// candidate actions, Q-values rounded to two decimals, the chosen action,
// reward, cumulative score and done flag.
std::string record_transcript(const std::vector<TranscriptStep>& episode);

}  // namespace textrl::env
