#include "textrl/nn/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace textrl::nn {

double finite_diff_check(const LossBuilder& build_loss, ParamContainer& params,
                         double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_check: eps must be > 0");
  if (params.coord_count() > 5000)
    throw std::invalid_argument("finite_diff_check: container exceeds 5000 coordinates");

  GradStore analytic(params);
  {
    Tape tape(params);
    Var loss = build_loss(tape);
    tape.backward(loss, analytic);
  }

  auto eval = [&]() {
    Tape tape(params);
    return tape.scalar(build_loss(tape));
  };

  double max_rel = 0.0;
  for (int p = 0; p < params.count(); ++p) {
    Mat& tensor = params.value(p);
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
      for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
        const double saved = tensor(r, c);
        tensor(r, c) = saved + eps;
        const double up = eval();
        tensor(r, c) = saved - eps;
        const double down = eval();
        tensor(r, c) = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double diff = std::abs(analytic.at(p)(r, c) - numeric);
        const double rel = diff / std::max(1e-8, std::abs(numeric));
        max_rel = std::max(max_rel, rel);
      }
    }
  }
  return max_rel;
}

}  // namespace textrl::nn
