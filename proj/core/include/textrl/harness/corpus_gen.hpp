#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace textrl::harness {

struct CorpusGenConfig {
  std::vector<std::string> game_paths;
  std::size_t pairs = 5000;
  std::uint64_t seed = 7;
  int random_per_optimal = 4;  // random-walk episodes per optimal replay
};

// Synthetic gameplay transcript corpus: uniform random walks over the valid
// actions interleaved with optimal-sequence replays, one
// `observation<TAB>action` line per step.
std::string generate_corpus(const CorpusGenConfig& config);

}  // namespace textrl::harness
