#include "textrl/nn/adam.hpp"

#include <cmath>

#include "textrl/errors.hpp"

namespace textrl::nn {

AdamState::AdamState(const ParamContainer& params) {
  m.reserve(static_cast<std::size_t>(params.count()));
  v.reserve(static_cast<std::size_t>(params.count()));
  for (int i = 0; i < params.count(); ++i) {
    m.emplace_back(Mat::Zero(params.value(i).rows(), params.value(i).cols()));
    v.emplace_back(Mat::Zero(params.value(i).rows(), params.value(i).cols()));
  }
}

void adam_step(ParamContainer& params, const GradStore& grads, AdamState& state,
               double lr) {
  if (static_cast<int>(state.m.size()) != params.count() ||
      grads.count() != params.count())
    throw DimMismatch("adam state does not match the parameter container");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (int i = 0; i < params.count(); ++i) {
    const Mat& g = grads.at(i);
    Mat& m = state.m[static_cast<std::size_t>(i)];
    Mat& v = state.v[static_cast<std::size_t>(i)];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    if (lr == 0.0) continue;
    Mat mhat = m / bc1;
    Mat vhat = v / bc2;
    params.value(i).array() -=
        lr * mhat.array() / (vhat.array().sqrt() + state.eps);
  }
}

double clip_global_norm(GradStore& grads, double max_norm) {
  double norm = grads.global_norm();
  if (norm > max_norm && norm > 0.0) grads.scale(max_norm / norm);
  return norm;
}

}  // namespace textrl::nn
