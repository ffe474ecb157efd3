#include "textrl/harness/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "textrl/errors.hpp"

namespace textrl::harness {

namespace {

std::string world_key(const env::WorldState& state) {
  std::ostringstream key;
  key << state.player_room << ';';
  for (const auto& [id, loc] : state.object_locations) key << id << '=' << loc << ';';
  for (int e : state.fired_events) key << e << ',';
  key << '#' << state.steps_taken;
  return key.str();
}

struct Edge {
  int action_index = 0;  // into the node's valid action list
  double reward = 0.0;
  int next = -1;  // -1 for terminal
};

struct Node {
  env::WorldState state;
  std::vector<env::Action> actions;
  std::vector<Edge> edges;
  double v_gamma = 0.0;
  double v_one = 0.0;
  int best_len = 0;
};

}  // namespace

OracleResult tabular_oracle(const env::GameSpec& game, double gamma,
                            std::size_t max_states) {
  std::vector<Node> nodes;
  std::map<std::string, int> index;
  std::deque<int> queue;

  auto [start_state, start_obs] = env::reset(game);
  (void)start_obs;
  nodes.push_back(Node{start_state, {}, {}, 0, 0, 0});
  index[world_key(start_state)] = 0;
  queue.push_back(0);

  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    env::WorldState state = nodes[static_cast<std::size_t>(id)].state;
    if (state.done) continue;
    std::vector<env::Action> actions = env::valid_actions(game, state);
    std::vector<Edge> edges;
    edges.reserve(actions.size());
    for (std::size_t a = 0; a < actions.size(); ++a) {
      env::StepResult result = env::step(game, state, actions[a]);
      Edge edge;
      edge.action_index = static_cast<int>(a);
      edge.reward = static_cast<double>(result.reward);
      if (!result.done) {
        const std::string key = world_key(result.state);
        auto [it, fresh] = index.emplace(key, static_cast<int>(nodes.size()));
        if (fresh) {
          if (nodes.size() + 1 > max_states) throw StateSpaceTooLarge(max_states);
          nodes.push_back(Node{result.state, {}, {}, 0, 0, 0});
          queue.push_back(it->second);
        }
        edge.next = it->second;
      }
      edges.push_back(edge);
    }
    nodes[static_cast<std::size_t>(id)].actions = std::move(actions);
    nodes[static_cast<std::size_t>(id)].edges = std::move(edges);
  }

  // Value iteration, discounted and undiscounted. The steps component makes
  // the graph acyclic, so sweeps converge within the episode depth.
  int sweeps = 0;
  for (;; ++sweeps) {
    double residual = 0.0;
    for (auto& node : nodes) {
      double best_g = 0.0;
      double best_1 = 0.0;
      for (const Edge& e : node.edges) {
        double vg = e.reward;
        double v1 = e.reward;
        if (e.next >= 0) {
          vg += gamma * nodes[static_cast<std::size_t>(e.next)].v_gamma;
          v1 += nodes[static_cast<std::size_t>(e.next)].v_one;
        }
        best_g = std::max(best_g, vg);
        best_1 = std::max(best_1, v1);
      }
      residual = std::max(residual, std::abs(best_g - node.v_gamma));
      residual = std::max(residual, std::abs(best_1 - node.v_one));
      node.v_gamma = best_g;
      node.v_one = best_1;
    }
    if (residual < 1e-10) break;
    if (sweeps > game.episode_cap + 2) break;  // safety; cannot trigger on a DAG
  }

  // Shortest completion length among undiscounted-optimal continuations,
  // computed over decreasing steps (children always have larger steps).
  std::vector<int> order(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return nodes[static_cast<std::size_t>(a)].state.steps_taken >
           nodes[static_cast<std::size_t>(b)].state.steps_taken;
  });
  const int kInf = std::numeric_limits<int>::max() / 2;
  for (int id : order) {
    Node& node = nodes[static_cast<std::size_t>(id)];
    if (node.v_one <= 0.0) {
      node.best_len = 0;
      continue;
    }
    int best = kInf;
    for (const Edge& e : node.edges) {
      double v1 = e.reward + (e.next >= 0 ? nodes[static_cast<std::size_t>(e.next)].v_one : 0.0);
      if (std::abs(v1 - node.v_one) > 1e-9) continue;
      int len = 1 + (e.next >= 0 ? nodes[static_cast<std::size_t>(e.next)].best_len : 0);
      best = std::min(best, len);
    }
    node.best_len = best == kInf ? 0 : best;
  }

  // Greedy extraction of one shortest optimal sequence.
  OracleResult result;
  int cursor = 0;
  while (true) {
    Node& node = nodes[static_cast<std::size_t>(cursor)];
    if (node.v_one <= 0.0 || node.edges.empty()) break;
    int pick = -1;
    int pick_len = kInf;
    for (const Edge& e : node.edges) {
      double v1 = e.reward + (e.next >= 0 ? nodes[static_cast<std::size_t>(e.next)].v_one : 0.0);
      if (std::abs(v1 - node.v_one) > 1e-9) continue;
      int len = 1 + (e.next >= 0 ? nodes[static_cast<std::size_t>(e.next)].best_len : 0);
      if (len < pick_len) {
        pick_len = len;
        pick = e.action_index;
      }
    }
    if (pick < 0) break;
    const Edge* chosen = nullptr;
    for (const Edge& e : node.edges) {
      if (e.action_index == pick) {
        chosen = &e;
        break;
      }
    }
    result.optimal_sequence.push_back(node.actions[static_cast<std::size_t>(pick)]);
    if (chosen->next < 0) break;
    cursor = chosen->next;
  }

  result.optimal_return = nodes[0].v_one;
  result.start_value = nodes[0].v_gamma;
  result.state_count = nodes.size();
  result.sweeps = sweeps + 1;
  result.values.reserve(nodes.size());
  for (const Node& node : nodes) {
    result.values.push_back(OracleResult::StateValue{
        env::state_hash(node.state), node.state.steps_taken, node.v_gamma});
  }
  return result;
}

}  // namespace textrl::harness
