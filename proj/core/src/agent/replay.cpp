#include "textrl/agent/replay.hpp"

#include <cmath>
#include <stdexcept>

#include "textrl/errors.hpp"

namespace textrl::agent {

ReplayBuffer::ReplayBuffer(std::size_t general_capacity, std::size_t priority_capacity)
    : general_cap_(general_capacity), priority_cap_(priority_capacity) {
  if (general_cap_ == 0 || priority_cap_ == 0)
    throw std::invalid_argument("replay capacities must be positive");
}

void ReplayBuffer::push(Transition t, int episode_final_score, int best_seen_score) {
  const bool qualifies = episode_final_score >= best_seen_score;
  if (qualifies) {
    if (priority_.size() < priority_cap_) {
      priority_.push_back(t);
    } else {
      priority_[priority_pos_] = t;
      priority_pos_ = (priority_pos_ + 1) % priority_cap_;
    }
  }
  if (general_.size() < general_cap_) {
    general_.push_back(std::move(t));
  } else {
    general_[general_pos_] = std::move(t);
    general_pos_ = (general_pos_ + 1) % general_cap_;
  }
}

std::vector<Transition> ReplayBuffer::sample(int batch_size, double priority_fraction,
                                             Rng& rng) const {
  if (general_.empty()) throw BufferEmpty();
  if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  if (priority_fraction < 0.0 || priority_fraction > 1.0)
    throw std::invalid_argument("priority fraction must be in [0, 1]");

  const long want_priority =
      std::lround(priority_fraction * static_cast<double>(batch_size));
  std::vector<Transition> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  for (long i = 0; i < want_priority; ++i) {
    const auto& pool = priority_.empty() ? general_ : priority_;
    batch.push_back(pool[rng.uniform_int(pool.size())]);
  }
  for (long i = want_priority; i < batch_size; ++i) {
    batch.push_back(general_[rng.uniform_int(general_.size())]);
  }
  return batch;
}

}  // namespace textrl::agent
