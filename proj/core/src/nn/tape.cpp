#include "textrl/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "textrl/errors.hpp"

namespace textrl::nn {

namespace {
void check(bool ok, const char* what) {
  if (!ok) throw DimMismatch(what);
}
}  // namespace

Tape::Tape(const ParamContainer& params) : params_(&params) {
  nodes_.reserve(256);
  param_nodes_.assign(static_cast<std::size_t>(params.count()), -1);
}

Var Tape::push(Node&& n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(int param_index) {
  int& cached = param_nodes_.at(static_cast<std::size_t>(param_index));
  if (cached >= 0) return Var{cached};
  Node n;
  n.op = Op::kParam;
  n.i0 = param_index;
  n.value = params_->value(param_index);
  n.needs_grad = true;
  Var v = push(std::move(n));
  cached = v.id;
  return v;
}

Var Tape::param(std::string_view name) { return param(params_->require(name)); }

Var Tape::constant(Mat value) {
  Node n;
  n.op = Op::kConst;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::zeros(int rows, int cols) { return constant(Mat::Zero(rows, cols)); }

Var Tape::matmul(Var a, Var b) {
  check(value(a).cols() == value(b).rows(), "matmul inner dims");
  Node n;
  n.op = Op::kMatMul;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value.noalias() = value(a) * value(b);
  return push(std::move(n));
}

Var Tape::matmul_nt(Var a, Var b) {
  check(value(a).cols() == value(b).cols(), "matmul_nt inner dims");
  Node n;
  n.op = Op::kMatMulNT;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value.noalias() = value(a) * value(b).transpose();
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  check(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
        "add shapes");
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value = value(a) + value(b);
  return push(std::move(n));
}

Var Tape::add_rowvec(Var a, Var row) {
  check(value(row).rows() == 1 && value(row).cols() == value(a).cols(),
        "add_rowvec shapes");
  Node n;
  n.op = Op::kAddRow;
  n.a = a.id;
  n.b = row.id;
  n.needs_grad = node(a).needs_grad || node(row).needs_grad;
  n.value = value(a).rowwise() + value(row).row(0);
  return push(std::move(n));
}

Var Tape::hadamard(Var a, Var b) {
  check(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
        "hadamard shapes");
  Node n;
  n.op = Op::kHadamard;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value = value(a).cwiseProduct(value(b));
  return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.s0 = s;
  n.needs_grad = node(a).needs_grad;
  n.value = value(a) * s;
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = value(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = value(a).unaryExpr([](double x) { return std::tanh(x); });
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  Node n;
  n.op = Op::kRelu;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = value(a).cwiseMax(0.0);
  return push(std::move(n));
}

Var Tape::one_minus(Var a) {
  Node n;
  n.op = Op::kOneMinus;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Mat::Ones(value(a).rows(), value(a).cols()) - value(a);
  return push(std::move(n));
}

Var Tape::gather_rows(Var a, std::vector<int> rows) {
  const Mat& src = value(a);
  Node n;
  n.op = Op::kGatherRows;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value.resize(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check(rows[i] >= 0 && rows[i] < src.rows(), "gather_rows index");
    n.value.row(static_cast<Eigen::Index>(i)) = src.row(rows[i]);
  }
  n.ints = std::make_shared<std::vector<int>>(std::move(rows));
  return push(std::move(n));
}

bool Tape::any_needs_grad(const std::vector<Var>& parts) const {
  for (Var p : parts) {
    if (node(p).needs_grad) return true;
  }
  return false;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  check(!parts.empty(), "concat_cols empty");
  Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    check(value(p).rows() == rows, "concat_cols row count");
    cols += value(p).cols();
  }
  Node n;
  n.op = Op::kConcatCols;
  n.needs_grad = any_needs_grad(parts);
  n.value.resize(rows, cols);
  auto ids = std::make_shared<std::vector<int>>();
  Eigen::Index offset = 0;
  for (Var p : parts) {
    n.value.middleCols(offset, value(p).cols()) = value(p);
    offset += value(p).cols();
    ids->push_back(p.id);
  }
  n.ints = std::move(ids);
  return push(std::move(n));
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  check(!parts.empty(), "concat_rows empty");
  Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    check(value(p).cols() == cols, "concat_rows col count");
    rows += value(p).rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.needs_grad = any_needs_grad(parts);
  n.value.resize(rows, cols);
  auto ids = std::make_shared<std::vector<int>>();
  Eigen::Index offset = 0;
  for (Var p : parts) {
    n.value.middleRows(offset, value(p).rows()) = value(p);
    offset += value(p).rows();
    ids->push_back(p.id);
  }
  n.ints = std::move(ids);
  return push(std::move(n));
}

Var Tape::slice_cols(Var a, int begin, int count) {
  check(begin >= 0 && count > 0 && begin + count <= value(a).cols(),
        "slice_cols range");
  Node n;
  n.op = Op::kSliceCols;
  n.a = a.id;
  n.i0 = begin;
  n.needs_grad = node(a).needs_grad;
  n.value = value(a).middleCols(begin, count);
  return push(std::move(n));
}

Var Tape::pick_per_row(Var a, std::vector<int> cols) {
  const Mat& src = value(a);
  check(static_cast<Eigen::Index>(cols.size()) == src.rows(), "pick_per_row size");
  Node n;
  n.op = Op::kPickPerRow;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value.resize(src.rows(), 1);
  for (Eigen::Index i = 0; i < src.rows(); ++i) {
    int c = cols[static_cast<std::size_t>(i)];
    check(c >= 0 && c < src.cols(), "pick_per_row column");
    n.value(i, 0) = src(i, c);
  }
  n.ints = std::make_shared<std::vector<int>>(std::move(cols));
  return push(std::move(n));
}

Var Tape::softmax_rows(Var scores, Mat keep) {
  const Mat& s = value(scores);
  const bool masked = keep.size() > 0;
  if (masked)
    check(keep.rows() == s.rows() && keep.cols() == s.cols(), "softmax mask shape");
  Node n;
  n.op = Op::kSoftmaxRows;
  n.a = scores.id;
  n.needs_grad = node(scores).needs_grad;
  n.value.resize(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    double maxv = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (masked && keep(r, c) == 0.0) continue;
      maxv = std::max(maxv, s(r, c));
    }
    check(std::isfinite(maxv), "softmax row fully masked");
    double total = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      double e = (masked && keep(r, c) == 0.0) ? 0.0 : std::exp(s(r, c) - maxv);
      n.value(r, c) = e;
      total += e;
    }
    n.value.row(r) /= total;
  }
  // The saved output is all backward needs; the mask zeros survive in it.
  n.aux = std::make_shared<Mat>(n.value);
  return push(std::move(n));
}

Var Tape::layer_norm(Var a, Var gain, Var shift, double eps) {
  const Mat& x = value(a);
  check(value(gain).rows() == 1 && value(gain).cols() == x.cols(), "layer_norm gain");
  check(value(shift).rows() == 1 && value(shift).cols() == x.cols(), "layer_norm shift");
  Node n;
  n.op = Op::kLayerNorm;
  n.a = a.id;
  n.b = gain.id;
  n.c = shift.id;
  n.s0 = eps;
  n.needs_grad =
      node(a).needs_grad || node(gain).needs_grad || node(shift).needs_grad;
  const Eigen::Index d = x.cols();
  Mat xhat(x.rows(), d);
  Mat invstd(x.rows(), 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mean = x.row(r).mean();
    double var = (x.row(r).array() - mean).square().sum() / static_cast<double>(d);
    double is = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (x.row(r).array() - mean) * is;
    invstd(r, 0) = is;
  }
  Mat scale_row = Mat::Ones(1, d) + value(gain);
  n.value.resize(x.rows(), d);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    n.value.row(r) = xhat.row(r).cwiseProduct(scale_row.row(0)) + value(shift).row(0);
  }
  auto saved = std::make_shared<Mat>(x.rows(), d + 1);
  saved->leftCols(d) = xhat;
  saved->col(d) = invstd;
  n.aux = std::move(saved);
  return push(std::move(n));
}

Var Tape::mean_all(Var a) {
  Node n;
  n.op = Op::kMeanAll;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Mat::Constant(1, 1, value(a).mean());
  return push(std::move(n));
}

Var Tape::sum_all(Var a) {
  Node n;
  n.op = Op::kSumAll;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Mat::Constant(1, 1, value(a).sum());
  return push(std::move(n));
}

Var Tape::cross_entropy_rows(Var logits, std::vector<int> targets) {
  const Mat& z = value(logits);
  check(static_cast<Eigen::Index>(targets.size()) == z.rows(), "ce target count");
  Node n;
  n.op = Op::kCeRows;
  n.a = logits.id;
  n.needs_grad = node(logits).needs_grad;
  Mat probs(z.rows(), z.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    int t = targets[static_cast<std::size_t>(r)];
    check(t >= 0 && t < z.cols(), "ce target index");
    double maxv = z.row(r).maxCoeff();
    double lse = 0.0;
    for (Eigen::Index c = 0; c < z.cols(); ++c) lse += std::exp(z(r, c) - maxv);
    lse = maxv + std::log(lse);
    total += lse - z(r, t);
    probs.row(r) = (z.row(r).array() - lse).exp();
  }
  n.value = Mat::Constant(1, 1, total / static_cast<double>(z.rows()));
  n.aux = std::make_shared<Mat>(std::move(probs));
  n.ints = std::make_shared<std::vector<int>>(std::move(targets));
  return push(std::move(n));
}

Var Tape::bce_with_logits_mean(Var logits, Mat targets) {
  const Mat& z = value(logits);
  check(targets.rows() == z.rows() && targets.cols() == z.cols(), "bce shapes");
  Node n;
  n.op = Op::kBceMean;
  n.a = logits.id;
  n.needs_grad = node(logits).needs_grad;
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      double x = z(r, c);
      double t = targets(r, c);
      total += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
    }
  }
  n.value = Mat::Constant(1, 1, total / static_cast<double>(z.size()));
  n.aux = std::make_shared<Mat>(std::move(targets));
  return push(std::move(n));
}

Var Tape::squared_diff_mean(Var pred, Mat targets) {
  const Mat& p = value(pred);
  check(targets.rows() == p.rows() && targets.cols() == p.cols(), "sqdiff shapes");
  Node n;
  n.op = Op::kSqDiffMean;
  n.a = pred.id;
  n.needs_grad = node(pred).needs_grad;
  n.value = Mat::Constant(1, 1, (p - targets).squaredNorm() / static_cast<double>(p.size()));
  n.aux = std::make_shared<Mat>(std::move(targets));
  return push(std::move(n));
}

const Mat& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar(Var v) const {
  const Mat& m = value(v);
  check(m.rows() == 1 && m.cols() == 1, "scalar() on non 1x1 value");
  return m(0, 0);
}

void Tape::add_grad(int node_id, const Mat& g) {
  Node& n = nodes_.at(static_cast<std::size_t>(node_id));
  if (!n.needs_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var loss, GradStore& grads) {
  check(value(loss).rows() == 1 && value(loss).cols() == 1, "loss must be 1x1");
  if (!node(loss).needs_grad) return;  // no parameter on the path
  add_grad(loss.id, Mat::Ones(1, 1));

  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_.at(static_cast<std::size_t>(id));
    if (!n.has_grad || !n.needs_grad) continue;
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::kParam:
      case Op::kConst:
        break;
      case Op::kMatMul: {
        const Node& na = node(Var{n.a});
        const Node& nb = node(Var{n.b});
        if (na.needs_grad) add_grad(n.a, g * nb.value.transpose());
        if (nb.needs_grad) add_grad(n.b, na.value.transpose() * g);
        break;
      }
      case Op::kMatMulNT: {
        const Node& na = node(Var{n.a});
        const Node& nb = node(Var{n.b});
        if (na.needs_grad) add_grad(n.a, g * nb.value);
        if (nb.needs_grad) add_grad(n.b, g.transpose() * na.value);
        break;
      }
      case Op::kAdd:
        add_grad(n.a, g);
        add_grad(n.b, g);
        break;
      case Op::kAddRow: {
        add_grad(n.a, g);
        if (node(Var{n.b}).needs_grad) add_grad(n.b, g.colwise().sum());
        break;
      }
      case Op::kHadamard: {
        const Node& na = node(Var{n.a});
        const Node& nb = node(Var{n.b});
        if (na.needs_grad) add_grad(n.a, g.cwiseProduct(nb.value));
        if (nb.needs_grad) add_grad(n.b, g.cwiseProduct(na.value));
        break;
      }
      case Op::kScale:
        add_grad(n.a, g * n.s0);
        break;
      case Op::kSigmoid: {
        Mat da = (g.array() * n.value.array() * (1.0 - n.value.array())).matrix();
        add_grad(n.a, da);
        break;
      }
      case Op::kTanh: {
        Mat da = (g.array() * (1.0 - n.value.array().square())).matrix();
        add_grad(n.a, da);
        break;
      }
      case Op::kRelu: {
        Mat dm = (n.value.array() > 0.0).cast<double>();
        add_grad(n.a, g.cwiseProduct(dm));
        break;
      }
      case Op::kOneMinus:
        add_grad(n.a, -g);
        break;
      case Op::kGatherRows: {
        const Node& na = node(Var{n.a});
        Mat da = Mat::Zero(na.value.rows(), na.value.cols());
        const std::vector<int>& rows = *n.ints;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          da.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
        }
        add_grad(n.a, da);
        break;
      }
      case Op::kConcatCols: {
        Eigen::Index offset = 0;
        for (int pid : *n.ints) {
          const Node& np = node(Var{pid});
          Eigen::Index w = np.value.cols();
          if (np.needs_grad) add_grad(pid, g.middleCols(offset, w));
          offset += w;
        }
        break;
      }
      case Op::kConcatRows: {
        Eigen::Index offset = 0;
        for (int pid : *n.ints) {
          const Node& np = node(Var{pid});
          Eigen::Index h = np.value.rows();
          if (np.needs_grad) add_grad(pid, g.middleRows(offset, h));
          offset += h;
        }
        break;
      }
      case Op::kSliceCols: {
        const Node& na = node(Var{n.a});
        Mat da = Mat::Zero(na.value.rows(), na.value.cols());
        da.middleCols(n.i0, n.value.cols()) = g;
        add_grad(n.a, da);
        break;
      }
      case Op::kPickPerRow: {
        const Node& na = node(Var{n.a});
        Mat da = Mat::Zero(na.value.rows(), na.value.cols());
        const std::vector<int>& cols = *n.ints;
        for (Eigen::Index r = 0; r < na.value.rows(); ++r) {
          da(r, cols[static_cast<std::size_t>(r)]) += g(r, 0);
        }
        add_grad(n.a, da);
        break;
      }
      case Op::kSoftmaxRows: {
        const Mat& y = *n.aux;
        Mat da(y.rows(), y.cols());
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          double dot = g.row(r).cwiseProduct(y.row(r)).sum();
          da.row(r) = (y.row(r).array() * (g.row(r).array() - dot)).matrix();
        }
        add_grad(n.a, da);
        break;
      }
      case Op::kLayerNorm: {
        const Mat& saved = *n.aux;
        const Eigen::Index d = n.value.cols();
        const Node& na = node(Var{n.a});
        const Node& ng = node(Var{n.b});
        const Node& ns = node(Var{n.c});
        Mat xhat = saved.leftCols(d);
        Mat scale_row = Mat::Ones(1, d) + ng.value;
        if (ng.needs_grad) add_grad(n.b, g.cwiseProduct(xhat).colwise().sum());
        if (ns.needs_grad) add_grad(n.c, g.colwise().sum());
        if (na.needs_grad) {
          Mat da(n.value.rows(), d);
          for (Eigen::Index r = 0; r < n.value.rows(); ++r) {
            Eigen::RowVectorXd dxhat = g.row(r).cwiseProduct(scale_row.row(0));
            double mean_dxhat = dxhat.mean();
            double mean_dxhat_xhat = dxhat.cwiseProduct(xhat.row(r)).mean();
            da.row(r) = (saved(r, d) *
                         (dxhat.array() - mean_dxhat -
                          xhat.row(r).array() * mean_dxhat_xhat))
                            .matrix();
          }
          add_grad(n.a, da);
        }
        break;
      }
      case Op::kMeanAll: {
        const Node& na = node(Var{n.a});
        double w = g(0, 0) / static_cast<double>(na.value.size());
        add_grad(n.a, Mat::Constant(na.value.rows(), na.value.cols(), w));
        break;
      }
      case Op::kSumAll: {
        const Node& na = node(Var{n.a});
        add_grad(n.a, Mat::Constant(na.value.rows(), na.value.cols(), g(0, 0)));
        break;
      }
      case Op::kCeRows: {
        const Mat& probs = *n.aux;
        const std::vector<int>& targets = *n.ints;
        Mat da = probs;
        for (Eigen::Index r = 0; r < da.rows(); ++r) {
          da(r, targets[static_cast<std::size_t>(r)]) -= 1.0;
        }
        da *= g(0, 0) / static_cast<double>(da.rows());
        add_grad(n.a, da);
        break;
      }
      case Op::kBceMean: {
        const Node& na = node(Var{n.a});
        const Mat& targets = *n.aux;
        Mat sig = na.value.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
        Mat da = (sig - targets) * (g(0, 0) / static_cast<double>(na.value.size()));
        add_grad(n.a, da);
        break;
      }
      case Op::kSqDiffMean: {
        const Node& na = node(Var{n.a});
        const Mat& targets = *n.aux;
        Mat da = (na.value - targets) * (2.0 * g(0, 0) / static_cast<double>(na.value.size()));
        add_grad(n.a, da);
        break;
      }
    }
    // Parameter leaves export their gradient.
    if (n.op == Op::kParam) grads.at(n.i0) += n.grad;
  }
}

}  // namespace textrl::nn
