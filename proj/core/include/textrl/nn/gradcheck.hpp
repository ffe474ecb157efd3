#pragma once

#include <functional>

#include "textrl/nn/tape.hpp"

namespace textrl::nn {

// Builds the loss on a fresh tape over the (possibly perturbed) parameters.
using LossBuilder = std::function<Var(Tape&)>;

// Central-difference check of reverse-mode gradients over every coordinate of
// `params` (at most 5000 coordinates). Returns the maximum over coordinates of
// |analytic - numeric| / max(1e-8, |numeric|). The numeric side only ever
// evaluates the forward pass.
double finite_diff_check(const LossBuilder& build_loss, ParamContainer& params,
                         double eps);

}  // namespace textrl::nn
