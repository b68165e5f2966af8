// Copyright 2026 The rxvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal reverse-mode automatic differentiation over dense row-major
// matrices of doubles. Every tensor is two-dimensional; vectors are [1 x n].
// Feature maps of 2-D convolutions are stored as [H*W x C].

#ifndef RXVC_AUTOGRAD_H_
#define RXVC_AUTOGRAD_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rxvc/random.h"

namespace rxvc::ag {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
// Aligned storage keeps Eigen's kernels on one code path, so results do not
// depend on where the allocator happened to place a buffer.
using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;

struct Node {
  int rows = 0;
  int cols = 0;
  Buffer value;
  Buffer grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  double* GradBuffer();
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var Constant(int rows, int cols, std::vector<double> values);
  static Var Zeros(int rows, int cols);
  static Var Parameter(int rows, int cols, std::vector<double> values);
  static Var FromMatrix(const RowMatrix& m);

  bool defined() const { return node_ != nullptr; }
  int rows() const { return node_->rows; }
  int cols() const { return node_->cols; }
  size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  // Empty span when no gradient has been accumulated.
  std::span<const double> grad() const { return node_->grad; }
  double at(int r, int c) const { return node_->value[r * cols() + c]; }
  double item() const { return node_->value.at(0); }

  ConstMatMap mat() const { return {node_->value.data(), rows(), cols()}; }
  RowMatrix ToMatrix() const { return mat(); }

  void ZeroGrad();
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Accumulates d(loss)/d(x) into every reachable node that requires grad.
// loss must be [1 x 1].
void Backward(const Var& loss);

bool GradEnabled();

// Disables graph recording for the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Linear algebra
Var MatMul(const Var& a, const Var& b);
Var MatMulNT(const Var& a, const Var& b);  // a * b^T
Var Transpose(const Var& a);

// Elementwise
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var AddRow(const Var& a, const Var& row);  // broadcast [1 x n] over rows
Var Scale(const Var& a, double s);
Var AddScalar(const Var& a, double s);
Var Tanh(const Var& a);
Var Sigmoid(const Var& a);
Var Relu(const Var& a);
Var LeakyRelu(const Var& a, double slope);
Var Dropout(const Var& a, double p, Rng& rng);
Var Detach(const Var& a);

// Normalization and attention
Var SoftmaxRows(const Var& a);
Var LayerNormRows(const Var& a, const Var& gamma, const Var& beta,
                  double eps = 1e-5);
Var InstanceNormCols(const Var& a, double eps = 1e-5);

// Reductions
Var MeanRows(const Var& a);  // [1 x cols]
Var SumAll(const Var& a);
Var MeanAll(const Var& a);
Var MeanAbsError(const Var& a, const Var& b);
// 1 - cos(a, b) with norms clamped below by eps. a, b are [1 x n].
Var CosineEmbeddingLoss(const Var& a, const Var& b, double eps = 1e-8);

// Shape and indexing
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceRows(const Var& a, int start, int count);
Var SliceCols(const Var& a, int start, int count);
Var Reshape(const Var& a, int rows, int cols);
Var PadRows(const Var& a, int total_rows);  // zero rows appended
Var GatherRows(const Var& table, std::span<const int> ids);
// out.flat[i] = a.flat[index[i]], or 0 where index[i] < 0.
Var IndexGather(const Var& a, int rows, int cols,
                std::shared_ptr<const std::vector<int>> index);

// One direction of an LSTM over a whole sequence. gates_x is x*W_ih + b
// with gate blocks [input, forget, cell, output], w_hh is [H x 4H].
Var LstmRecurrence(const Var& gates_x, const Var& w_hh, bool reverse);

}  // namespace rxvc::ag

#endif  // RXVC_AUTOGRAD_H_
