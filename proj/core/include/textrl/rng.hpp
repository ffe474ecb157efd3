#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace textrl {

// Deterministic 64-bit generator (splitmix64). All randomness in the library
// goes through this class so runs are reproducible independent of the
// platform's <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();

  // Uniform in [lo, hi).
  double uniform_range(double lo, double hi);

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  // k distinct indices drawn from [0, n), in ascending order.
  std::vector<int> sample_without_replacement(int n, int k);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Index sampled proportionally to the (nonnegative) weights.
  int categorical(std::span<const double> weights);

  // Independent stream derived from this generator's seed and a stream id.
  Rng child(std::uint64_t stream) const;

 private:
  std::uint64_t state_;
};

}  // namespace textrl
