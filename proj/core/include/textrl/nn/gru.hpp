#pragma once

#include <string>
#include <utility>
#include <vector>

#include "textrl/nn/tape.hpp"

namespace textrl::nn {

// Gated recurrent unit with packed gate weights:
//   z = sigmoid(x Wx[:,0:h]   + h Whzr[:,0:h]   + b[0:h])
//   r = sigmoid(x Wx[:,h:2h]  + h Whzr[:,h:2h]  + b[h:2h])
//   c = tanh   (x Wx[:,2h:3h] + (r*h) Whc       + b[2h:3h])
//   h' = (1 - z) * h + z * c
// The initial hidden state is zero.
struct GruLayer {
  int input_dim = 0;
  int hidden_dim = 0;
  int wx = -1;    // input_dim x 3h
  int wh_zr = -1; // h x 2h
  int wh_c = -1;  // h x h
  int b = -1;     // 1 x 3h (bias)

  // Registers the four tensors under `prefix`.
  static GruLayer create(ParamContainer& params, const std::string& prefix,
                         int input_dim, int hidden_dim);
  // Binds to tensors previously registered or loaded.
  static GruLayer bind(const ParamContainer& params, const std::string& prefix);

  // One recurrence step for a batch. `x` is B x input_dim, `h` is B x hidden.
  Var step(Tape& tape, Var x, Var h) const;

  // Runs the recurrence over per-timestep batched inputs. steps[t] is
  // B x input_dim; active[t] is a B x hidden 0/1 matrix freezing finished
  // rows. Returns the final B x hidden state.
  Var forward_batch(Tape& tape, const std::vector<Var>& steps,
                    const std::vector<Mat>& active, int batch) const;

  // Single sequence given as L x input_dim. Returns (final 1 x h, all L x h);
  // the all-hiddens matrix is empty for L = 0.
  std::pair<Var, Var> forward_seq(Tape& tape, Var inputs) const;
};

}  // namespace textrl::nn
