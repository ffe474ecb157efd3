#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "textrl/nn/mat.hpp"
#include "textrl/rng.hpp"

namespace textrl::nn {

// Named tensors with fixed shapes. The registration order defines the
// serialization order, the initialization order and the gradient layout.
class ParamContainer {
 public:
  // Returns the entry index. Bias entries initialize to zero.
  int add(std::string name, int rows, int cols, bool bias = false);

  int find(std::string_view name) const;  // -1 when absent
  int require(std::string_view name) const;

  int count() const { return static_cast<int>(entries_.size()); }
  const std::string& name(int index) const { return entries_.at(static_cast<std::size_t>(index)).name; }
  bool is_bias(int index) const { return entries_.at(static_cast<std::size_t>(index)).bias; }
  Mat& value(int index) { return entries_.at(static_cast<std::size_t>(index)).value; }
  const Mat& value(int index) const { return entries_.at(static_cast<std::size_t>(index)).value; }
  Mat& value(std::string_view name) { return value(require(name)); }
  const Mat& value(std::string_view name) const { return value(require(name)); }

  std::size_t coord_count() const;

  // Weights uniform in (-range, range) from the seeded generator, biases
  // exactly zero. Deterministic per seed.
  void init_uniform(std::uint64_t seed, double range = 0.08);

  // FNV-1a over names, shapes and raw tensor bytes in registration order.
  std::uint64_t fingerprint() const;

 private:
  struct Entry {
    std::string name;
    Mat value;
    bool bias = false;
  };
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

// Gradient tensors shaped like a container's entries.
class GradStore {
 public:
  explicit GradStore(const ParamContainer& params);

  Mat& at(int index) { return grads_.at(static_cast<std::size_t>(index)); }
  const Mat& at(int index) const { return grads_.at(static_cast<std::size_t>(index)); }
  int count() const { return static_cast<int>(grads_.size()); }

  void set_zero();
  double global_norm() const;
  void scale(double factor);

 private:
  std::vector<Mat> grads_;
};

}  // namespace textrl::nn
