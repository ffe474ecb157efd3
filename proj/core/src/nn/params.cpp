#include "textrl/nn/params.hpp"

#include <cmath>
#include <stdexcept>

namespace textrl::nn {

int ParamContainer::add(std::string name, int rows, int cols, bool bias) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("parameter '" + name + "' needs positive dims");
  auto [it, inserted] = index_.emplace(name, count());
  if (!inserted)
    throw std::invalid_argument("duplicate parameter '" + name + "'");
  Entry entry;
  entry.name = std::move(name);
  entry.value = Mat::Zero(rows, cols);
  entry.bias = bias;
  entries_.push_back(std::move(entry));
  return it->second;
}

int ParamContainer::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

int ParamContainer::require(std::string_view name) const {
  int idx = find(name);
  if (idx < 0)
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
  return idx;
}

std::size_t ParamContainer::coord_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += static_cast<std::size_t>(e.value.size());
  return n;
}

void ParamContainer::init_uniform(std::uint64_t seed, double range) {
  Rng rng(seed);
  for (auto& e : entries_) {
    if (e.bias) {
      e.value.setZero();
      continue;
    }
    for (Eigen::Index r = 0; r < e.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.value.cols(); ++c) {
        e.value(r, c) = rng.uniform_range(-range, range);
      }
    }
  }
}

std::uint64_t ParamContainer::fingerprint() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix_bytes = [&h](const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001B3ull;
    }
  };
  for (const auto& e : entries_) {
    mix_bytes(e.name.data(), e.name.size());
    std::int64_t dims[2] = {e.value.rows(), e.value.cols()};
    mix_bytes(dims, sizeof(dims));
    mix_bytes(e.value.data(), sizeof(double) * static_cast<std::size_t>(e.value.size()));
  }
  return h;
}

GradStore::GradStore(const ParamContainer& params) {
  grads_.reserve(static_cast<std::size_t>(params.count()));
  for (int i = 0; i < params.count(); ++i) {
    grads_.emplace_back(Mat::Zero(params.value(i).rows(), params.value(i).cols()));
  }
}

void GradStore::set_zero() {
  for (auto& g : grads_) g.setZero();
}

double GradStore::global_norm() const {
  double total = 0.0;
  for (const auto& g : grads_) total += g.squaredNorm();
  return std::sqrt(total);
}

void GradStore::scale(double factor) {
  for (auto& g : grads_) g *= factor;
}

}  // namespace textrl::nn
