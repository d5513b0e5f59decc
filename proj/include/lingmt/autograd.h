// Copyright 2026 The lingmt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

// Named parameter storage and a reverse-mode tape over dense matrices.
//
// A Tape records every operation in creation order; backward() replays the
// recorded adjoints in reverse. Parameters enter a tape once, as leaves bound
// to their name, so every use of a tensor on the tape accumulates into one
// gradient.

#ifndef LINGMT_AUTOGRAD_H_
#define LINGMT_AUTOGRAD_H_

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lingmt {

using Matrix = Eigen::MatrixXd;

// Trainable tensors addressable by unique name. Values are held in double
// precision but kept representable in 32 bits (see round_to_storage), which
// is what checkpoints store.
class ModelParams {
 public:
  // Adds a zero tensor; throws ShapeError if the name exists.
  Matrix& add(const std::string& name, int rows, int cols);
  bool contains(const std::string& name) const {
    return tensors_.count(name) > 0;
  }
  // Throws ShapeError on unknown names.
  const Matrix& at(const std::string& name) const;
  Matrix& at(const std::string& name);
  const std::map<std::string, Matrix>& tensors() const { return tensors_; }
  std::map<std::string, Matrix>& tensors() { return tensors_; }
  size_t parameter_count() const;
  // Rounds every value to the nearest 32-bit float.
  void round_to_storage();
  bool operator==(const ModelParams& other) const;

 private:
  std::map<std::string, Matrix> tensors_;
};

using GradientSet = std::map<std::string, Matrix>;

class Tape;

// Handle to a tape node.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  bool valid() const { return tape != nullptr && id >= 0; }
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& out_grad)>;

  explicit Tape(const ModelParams* params = nullptr) : params_(params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Leaf bound to a parameter; repeated calls return the same node.
  Var param(const std::string& name);
  Var record(Matrix value, Backward backward);

  const Matrix& value(int id) const { return nodes_[id].value; }
  // Adds `g` into the gradient of node `id`.
  void accumulate(int id, const Matrix& g);
  template <typename Fn>
  void accumulate_with(int id, Fn&& fn) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    fn(n.grad);
  }
  const Matrix* grad(int id) const;

  // Seeds d(loss)/d(loss) = 1 for a 1x1 loss.
  void backward(Var loss);
  // Seeds arbitrary upstream gradients, then backpropagates.
  void backward(const std::vector<std::pair<Var, Matrix>>& seeds);

  // Gradient of every parameter of the bound store; untouched parameters get
  // zeros.
  GradientSet parameter_gradients() const;
  size_t size() const { return nodes_.size(); }
  const ModelParams* params() const { return params_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    std::string param;
  };
  void run_backward();

  const ModelParams* params_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> param_nodes_;
  bool backward_done_ = false;
};

// Differentiable operations. Shapes are checked and mismatches throw
// ShapeError.
namespace ops {

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
// Adds a 1 x cols row to every row of `a`.
Var add_row(Var a, Var row);
// x W + b with b a 1 x out row.
Var linear(Var x, Var w, Var b);
Var gelu(Var x);
Var tanh(Var x);
Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-12);
// Rows `ids` of `table`.
Var gather_rows(Var table, const std::vector<int>& ids);
Var concat_rows(const std::vector<Var>& parts);
// Multi-head scaled dot-product attention; keys with valid_key[j] == false
// receive zero weight.
Var attention(Var q, Var k, Var v, int heads,
              const std::vector<bool>& valid_key);
// Fencepost span features over rows 0..n+1 of `p` (row 0 and n+1 are the
// boundary tokens): for word span (i, j) the left half of the columns gives
// p[j+1] - p[i] and the right half p[i+1] - p[j+2].
Var fence_spans(Var p, const std::vector<std::pair<int, int>>& spans);
// out[k, r] = dot(left[pairs[k].first, r*w:(r+1)*w], right[pairs[k].second])
// where w = right.cols() and left has labels * w columns.
Var pair_block_dot(Var left, Var right,
                   const std::vector<std::pair<int, int>>& pairs, int labels);
// scale * sum_i -log softmax(logits_i)[targets_i].
Var softmax_cross_entropy(Var logits, const std::vector<int>& targets,
                          double scale);
// scale * sum_i weights_i * BCE(sigmoid(logits_i), targets_i) for an n x 1
// column of logits.
Var sigmoid_cross_entropy(Var logits, const std::vector<double>& targets,
                          const std::vector<double>& weights, double scale);
// sum_k coef_k * x(row_k, col_k)
Var pick_sum(Var x, const std::vector<std::tuple<int, int, double>>& entries);
// sum_k coef_k * s_k over 1x1 inputs, plus `offset`.
Var combine(const std::vector<Var>& scalars, const std::vector<double>& coefs,
            double offset = 0.0);

}  // namespace ops

}  // namespace lingmt

#endif  // LINGMT_AUTOGRAD_H_
