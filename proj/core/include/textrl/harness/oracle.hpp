#pragma once

#include <cstdint>
#include <vector>

#include "textrl/env/engine.hpp"

namespace textrl::harness {

struct OracleResult {
  // Best undiscounted return achievable from reset within the episode cap.
  double optimal_return = 0.0;
  // One shortest action sequence achieving it.
  std::vector<env::Action> optimal_sequence;
  // Discounted optimal value per enumerated (world digest, steps) state.
  struct StateValue {
    std::uint64_t digest = 0;
    int steps = 0;
    double value = 0.0;
  };
  std::vector<StateValue> values;
  double start_value = 0.0;  // discounted value at the reset state
  std::size_t state_count = 0;
  int sweeps = 0;
};

// Enumerates the reachable state space by breadth-first closure over valid
// actions from reset (state identity: world digest + steps taken) and runs
// value iteration to residual < 1e-10. Throws StateSpaceTooLarge beyond
// max_states.
OracleResult tabular_oracle(const env::GameSpec& game, double gamma,
                            std::size_t max_states = 10000);

}  // namespace textrl::harness
