#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "textrl/nn/mat.hpp"
#include "textrl/nn/params.hpp"

namespace textrl::nn {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode computation tape over dense matrices. Construction order is
// the topological order; backward walks it in reverse and accumulates
// parameter gradients into a GradStore. Forward values are plain Eigen
// matrices, so the same ops serve gradient-free evaluation.
class Tape {
 public:
  explicit Tape(const ParamContainer& params);

  Var param(int param_index);
  Var param(std::string_view name);
  Var constant(Mat value);
  Var zeros(int rows, int cols);

  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);  // A * B^T
  Var add(Var a, Var b);
  Var add_rowvec(Var a, Var row);  // broadcast a 1xN row over all rows
  Var hadamard(Var a, Var b);
  Var scale(Var a, double s);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var one_minus(Var a);  // 1 - a

  Var gather_rows(Var a, std::vector<int> rows);
  Var concat_cols(const std::vector<Var>& parts);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_cols(Var a, int begin, int count);
  Var pick_per_row(Var a, std::vector<int> cols);  // column of a(i, cols[i])

  // Row softmax; entries where keep == 0 get probability 0. Pass an empty
  // matrix to disable masking.
  Var softmax_rows(Var scores, Mat keep = Mat());

  // Row-wise layer norm with population variance; output is
  // normalized * (1 + gain) + shift, so zero-initialized gain/shift give the
  // identity affine part. gain/shift are 1xN.
  Var layer_norm(Var a, Var gain, Var shift, double eps = 1e-10);

  Var mean_all(Var a);
  Var sum_all(Var a);

  // Mean over rows of -log softmax(row)[target].
  Var cross_entropy_rows(Var logits, std::vector<int> targets);
  // Mean element-wise binary cross-entropy between sigmoid(logits) and 0/1
  // targets, computed in the stable softplus form.
  Var bce_with_logits_mean(Var logits, Mat targets);
  // Mean of (pred - target)^2 over all elements.
  Var squared_diff_mean(Var pred, Mat targets);

  const Mat& value(Var v) const;
  double scalar(Var v) const;
  int rows(Var v) const { return static_cast<int>(value(v).rows()); }
  int cols(Var v) const { return static_cast<int>(value(v).cols()); }
  std::size_t node_count() const { return nodes_.size(); }

  // Seeds d(loss)=1 and accumulates parameter gradients into `grads`.
  // `loss` must be 1x1.
  void backward(Var loss, GradStore& grads);

 private:
  enum class Op : unsigned char {
    kParam, kConst, kMatMul, kMatMulNT, kAdd, kAddRow, kHadamard, kScale,
    kSigmoid, kTanh, kRelu, kOneMinus, kGatherRows, kConcatCols, kConcatRows,
    kSliceCols, kPickPerRow, kSoftmaxRows, kLayerNorm, kMeanAll, kSumAll,
    kCeRows, kBceMean, kSqDiffMean,
  };

  struct Node {
    Op op;
    int a = -1, b = -1, c = -1;
    int i0 = 0;
    double s0 = 0.0;
    Mat value;
    Mat grad;
    bool needs_grad = false;
    bool has_grad = false;
    std::shared_ptr<std::vector<int>> ints;
    std::shared_ptr<Mat> aux;
  };

  Node& node(Var v) { return nodes_.at(static_cast<std::size_t>(v.id)); }
  const Node& node(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)); }
  Var push(Node&& n);
  bool any_needs_grad(const std::vector<Var>& parts) const;
  void add_grad(int node_id, const Mat& g);

  const ParamContainer* params_;
  std::vector<Node> nodes_;
  std::vector<int> param_nodes_;  // node id per container entry, -1 if unused
};

}  // namespace textrl::nn
