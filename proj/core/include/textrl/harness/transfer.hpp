#pragma once

#include <cstdint>
#include <string>

#include "textrl/agent/agent.hpp"
#include "textrl/harness/train.hpp"

namespace textrl::harness {

struct TransferResult {
  double average_score = 0.0;
  int episodes = 0;
  bool fingerprint_unchanged = false;
  std::uint64_t fingerprint = 0;
};

// Plays `episodes` episodes on the agent's bound game with zero parameter
// updates; the agent fingerprint is checked before and after.
TransferResult transfer_eval(const agent::Agent& agent, int episodes = 300,
                             double temperature = 0.01, std::uint64_t seed = 1);

// Loads the checkpoint against the target game and evaluates it there.
// DRRN agents carry only text; TDQN head widths must match the target's
// template/filler counts (IncompatibleActionSpace otherwise).
TransferResult transfer_eval_checkpoint(const std::string& agent_ckpt,
                                        const env::GameSpec& target_game,
                                        int episodes = 300,
                                        double temperature = 0.01,
                                        std::uint64_t seed = 1);

}  // namespace textrl::harness
