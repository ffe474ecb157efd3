#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "textrl/env/game.hpp"
#include "textrl/rng.hpp"

namespace textrl::agent {

struct Transition {
  std::string state_text;
  env::Action action;
  int reward = 0;
  std::string next_state_text;
  std::vector<env::Action> next_valid_actions;  // empty only when done
  bool done = false;
  int episode_score_at_store = 0;
};

// General ring buffer plus a priority ring holding transitions of episodes
// whose final score reached the best seen at storage time.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t general_capacity, std::size_t priority_capacity);

  // Appends to the general buffer always; also to the priority buffer when
  // episode_final_score >= best_seen_score.
  void push(Transition t, int episode_final_score, int best_seen_score);

  // Exactly round(priority_fraction * batch_size) transitions drawn uniformly
  // with replacement from the priority buffer (general when priority is
  // empty), the rest from the general buffer. Throws BufferEmpty when the
  // general buffer is empty.
  std::vector<Transition> sample(int batch_size, double priority_fraction,
                                 Rng& rng) const;

  std::size_t general_size() const { return general_.size(); }
  std::size_t priority_size() const { return priority_.size(); }
  const Transition& general_at(std::size_t i) const { return general_[i]; }
  const Transition& priority_at(std::size_t i) const { return priority_[i]; }

 private:
  std::vector<Transition> general_;
  std::vector<Transition> priority_;
  std::size_t general_cap_;
  std::size_t priority_cap_;
  std::size_t general_pos_ = 0;
  std::size_t priority_pos_ = 0;
};

}  // namespace textrl::agent
