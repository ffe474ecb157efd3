#include "textrl/nn/gru.hpp"

#include "textrl/errors.hpp"

namespace textrl::nn {

GruLayer GruLayer::create(ParamContainer& params, const std::string& prefix,
                          int input_dim, int hidden_dim) {
  GruLayer gru;
  gru.input_dim = input_dim;
  gru.hidden_dim = hidden_dim;
  gru.wx = params.add(prefix + ".wx", input_dim, 3 * hidden_dim);
  gru.wh_zr = params.add(prefix + ".wh_zr", hidden_dim, 2 * hidden_dim);
  gru.wh_c = params.add(prefix + ".wh_c", hidden_dim, hidden_dim);
  gru.b = params.add(prefix + ".b", 1, 3 * hidden_dim, /*bias=*/true);
  return gru;
}

GruLayer GruLayer::bind(const ParamContainer& params, const std::string& prefix) {
  GruLayer gru;
  gru.wx = params.require(prefix + ".wx");
  gru.wh_zr = params.require(prefix + ".wh_zr");
  gru.wh_c = params.require(prefix + ".wh_c");
  gru.b = params.require(prefix + ".b");
  gru.input_dim = static_cast<int>(params.value(gru.wx).rows());
  gru.hidden_dim = static_cast<int>(params.value(gru.wh_c).rows());
  return gru;
}

Var GruLayer::step(Tape& tape, Var x, Var h) const {
  if (tape.cols(x) != input_dim)
    throw DimMismatch("gru input width " + std::to_string(tape.cols(x)));
  const int hd = hidden_dim;
  Var gx = tape.add_rowvec(tape.matmul(x, tape.param(wx)), tape.param(b));
  Var zr = tape.add(tape.slice_cols(gx, 0, 2 * hd),
                    tape.matmul(h, tape.param(wh_zr)));
  Var z = tape.sigmoid(tape.slice_cols(zr, 0, hd));
  Var r = tape.sigmoid(tape.slice_cols(zr, hd, hd));
  Var c_pre = tape.add(tape.slice_cols(gx, 2 * hd, hd),
                       tape.matmul(tape.hadamard(r, h), tape.param(wh_c)));
  Var c = tape.tanh(c_pre);
  return tape.add(tape.hadamard(tape.one_minus(z), h), tape.hadamard(z, c));
}

Var GruLayer::forward_batch(Tape& tape, const std::vector<Var>& steps,
                            const std::vector<Mat>& active, int batch) const {
  Var h = tape.zeros(batch, hidden_dim);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    Var h_new = step(tape, steps[t], h);
    const Mat& keep = active[t];
    if ((keep.array() == 1.0).all()) {
      h = h_new;
    } else {
      Var m = tape.constant(keep);
      h = tape.add(tape.hadamard(m, h_new),
                   tape.hadamard(tape.one_minus(m), h));
    }
  }
  return h;
}

std::pair<Var, Var> GruLayer::forward_seq(Tape& tape, Var inputs) const {
  const int length = tape.rows(inputs);
  Var h = tape.zeros(1, hidden_dim);
  std::vector<Var> hiddens;
  hiddens.reserve(static_cast<std::size_t>(length));
  for (int t = 0; t < length; ++t) {
    Var x = tape.gather_rows(inputs, {t});
    h = step(tape, x, h);
    hiddens.push_back(h);
  }
  Var all = hiddens.empty() ? Var{} : tape.concat_rows(hiddens);
  return {h, all};
}

}  // namespace textrl::nn
