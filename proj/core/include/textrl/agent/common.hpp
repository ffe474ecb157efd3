#pragma once

#include <span>
#include <string>
#include <vector>

#include "textrl/env/game.hpp"
#include "textrl/rng.hpp"

namespace textrl::agent {

enum class AgentKind { kDrrn, kTdqn };

const char* to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

// The textual state an agent conditions on: the observation triple plus the
// command that produced it (empty at an episode start).
struct StateParts {
  std::string event;
  std::string inventory;
  std::string look;
  std::string prev_action;
};

StateParts state_parts(const env::Observation& obs, const std::string& prev_action);

// "event | inventory | look | prev" -- the stored form of a state.
std::string join_state_text(const StateParts& parts);
StateParts split_state_text(const std::string& text);

// Numerically stabilized softmax of q / temperature.
std::vector<double> softmax_probs(std::span<const double> q, double temperature);

// Index i with probability softmax(q / temperature)[i].
int softmax_sample(std::span<const double> q, double temperature, Rng& rng);

}  // namespace textrl::agent
