#pragma once

#include <vector>

#include "textrl/nn/params.hpp"

namespace textrl::nn {

struct AdamState {
  std::vector<Mat> m;
  std::vector<Mat> v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(const ParamContainer& params);
};

// Bias-corrected Adam update in place. lr = 0 leaves the parameters
// unchanged (the step counter still advances).
void adam_step(ParamContainer& params, const GradStore& grads, AdamState& state,
               double lr);

// Scales gradients so their global norm is at most max_norm. Returns the norm
// before clipping.
double clip_global_norm(GradStore& grads, double max_norm);

}  // namespace textrl::nn
