#include "textrl/agent/common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "textrl/env/engine.hpp"

namespace textrl::agent {

const char* to_string(AgentKind kind) {
  return kind == AgentKind::kDrrn ? "drrn" : "tdqn";
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "drrn") return AgentKind::kDrrn;
  if (name == "tdqn") return AgentKind::kTdqn;
  throw std::invalid_argument("unknown agent kind '" + name + "'");
}

StateParts state_parts(const env::Observation& obs, const std::string& prev_action) {
  return StateParts{obs.event_text, obs.inventory_text, obs.look_text, prev_action};
}

std::string join_state_text(const StateParts& parts) {
  return parts.event + " | " + parts.inventory + " | " + parts.look + " | " +
         parts.prev_action;
}

StateParts split_state_text(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    std::size_t sep = text.find(" | ", begin);
    if (sep == std::string::npos) {
      parts.push_back(text.substr(begin));
      break;
    }
    parts.push_back(text.substr(begin, sep - begin));
    begin = sep + 3;
  }
  if (parts.size() == 3) parts.push_back("");
  if (parts.size() != 4)
    throw std::invalid_argument("state text does not have 3 or 4 parts: '" + text + "'");
  return StateParts{parts[0], parts[1], parts[2], parts[3]};
}

std::vector<double> softmax_probs(std::span<const double> q, double temperature) {
  if (q.empty()) throw std::invalid_argument("softmax over empty values");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  double maxv = *std::max_element(q.begin(), q.end());
  std::vector<double> probs(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    probs[i] = std::exp((q[i] - maxv) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

int softmax_sample(std::span<const double> q, double temperature, Rng& rng) {
  std::vector<double> probs = softmax_probs(q, temperature);
  return rng.categorical(probs);
}

}  // namespace textrl::agent
