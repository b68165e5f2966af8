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

#include "rxvc/autograd.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rxvc/errors.h"

namespace rxvc::ag {
namespace {

thread_local bool g_grad_enabled = true;

using NodePtr = std::shared_ptr<Node>;
using RowArray = Eigen::Array<double, 1, Eigen::Dynamic>;

void Require(bool cond, const char* what) {
  if (!cond) throw InvalidInput(std::string("shape mismatch: ") + what);
}

bool AnyRequiresGrad(std::initializer_list<const Var*> vars) {
  for (const Var* v : vars)
    if (v->requires_grad()) return true;
  return false;
}

// Allocates the result node and wires the graph edge when recording.
Var MakeResult(int rows, int cols, std::initializer_list<const Var*> inputs,
               std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value.assign(static_cast<size_t>(rows) * cols, 0.0);
  if (g_grad_enabled && AnyRequiresGrad(inputs)) {
    node->requires_grad = true;
    for (const Var* v : inputs) node->inputs.push_back(v->node());
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

Var MakeResultN(int rows, int cols, std::span<const Var> inputs,
                std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value.assign(static_cast<size_t>(rows) * cols, 0.0);
  bool any = false;
  for (const Var& v : inputs) any = any || v.requires_grad();
  if (g_grad_enabled && any) {
    node->requires_grad = true;
    for (const Var& v : inputs) node->inputs.push_back(v.node());
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

MatMap Values(Node& n) { return {n.value.data(), n.rows, n.cols}; }
MatMap Grads(Node& n) { return {n.GradBuffer(), n.rows, n.cols}; }
ConstMatMap OutGrad(Node& n) { return {n.grad.data(), n.rows, n.cols}; }

template <typename F, typename DF>
Var Unary(const Var& a, F f, DF df) {
  Var out = MakeResult(a.rows(), a.cols(), {&a}, nullptr);
  auto& ov = out.node()->value;
  const auto av = a.values();
  for (size_t i = 0; i < ov.size(); ++i) ov[i] = f(av[i]);
  if (out.requires_grad()) {
    out.node()->backward = [df](Node& self) {
      Node& in = *self.inputs[0];
      double* g = in.GradBuffer();
      for (size_t i = 0; i < self.value.size(); ++i)
        g[i] += self.grad[i] * df(in.value[i], self.value[i]);
    };
  }
  return out;
}

}  // namespace

double* Node::GradBuffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad.data();
}

Var Var::Constant(int rows, int cols, std::vector<double> values) {
  if (values.size() != static_cast<size_t>(rows) * cols)
    throw InvalidInput("Var::Constant: value count does not match shape");
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->value.assign(values.begin(), values.end());
  return Var(std::move(node));
}

Var Var::Zeros(int rows, int cols) {
  return Constant(rows, cols, std::vector<double>(size_t(rows) * cols, 0.0));
}

Var Var::Parameter(int rows, int cols, std::vector<double> values) {
  Var v = Constant(rows, cols, std::move(values));
  v.node_->requires_grad = true;
  return v;
}

Var Var::FromMatrix(const RowMatrix& m) {
  std::vector<double> values(m.data(), m.data() + m.size());
  return Constant(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                  std::move(values));
}

void Var::ZeroGrad() { node_->grad.clear(); }

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

void Backward(const Var& loss) {
  if (loss.size() != 1) throw InvalidInput("Backward: loss must be scalar");
  if (!loss.requires_grad()) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && !child->inputs.empty() &&
          seen.insert(child).second)
        stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.node()->GradBuffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

Var MatMul(const Var& a, const Var& b) {
  Require(a.cols() == b.rows(), "MatMul");
  Var out = MakeResult(a.rows(), b.cols(), {&a, &b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    ConstMatMap g = OutGrad(self);
    if (x.requires_grad) Grads(x).noalias() += g * Values(y).transpose();
    if (y.requires_grad) Grads(y).noalias() += Values(x).transpose() * g;
  });
  Values(*out.node()).noalias() = a.mat() * b.mat();
  return out;
}

Var MatMulNT(const Var& a, const Var& b) {
  Require(a.cols() == b.cols(), "MatMulNT");
  Var out = MakeResult(a.rows(), b.rows(), {&a, &b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    ConstMatMap g = OutGrad(self);
    if (x.requires_grad) Grads(x).noalias() += g * Values(y);
    if (y.requires_grad) Grads(y).noalias() += g.transpose() * Values(x);
  });
  Values(*out.node()).noalias() = a.mat() * b.mat().transpose();
  return out;
}

Var Transpose(const Var& a) {
  Var out = MakeResult(a.cols(), a.rows(), {&a}, [](Node& self) {
    Grads(*self.inputs[0]) += OutGrad(self).transpose();
  });
  Values(*out.node()) = a.mat().transpose();
  return out;
}

Var Add(const Var& a, const Var& b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Add");
  Var out = MakeResult(a.rows(), a.cols(), {&a, &b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      double* g = in->GradBuffer();
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
  auto& ov = out.node()->value;
  const auto av = a.values(), bv = b.values();
  for (size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
  return out;
}

Var Sub(const Var& a, const Var& b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Sub");
  Var out = MakeResult(a.rows(), a.cols(), {&a, &b}, [](Node& self) {
    for (int k = 0; k < 2; ++k) {
      Node& in = *self.inputs[k];
      if (!in.requires_grad) continue;
      const double sign = k == 0 ? 1.0 : -1.0;
      double* g = in.GradBuffer();
      for (size_t i = 0; i < self.grad.size(); ++i) g[i] += sign * self.grad[i];
    }
  });
  auto& ov = out.node()->value;
  const auto av = a.values(), bv = b.values();
  for (size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
  return out;
}

Var Mul(const Var& a, const Var& b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Mul");
  Var out = MakeResult(a.rows(), a.cols(), {&a, &b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (x.requires_grad) {
      double* g = x.GradBuffer();
      for (size_t i = 0; i < self.grad.size(); ++i)
        g[i] += self.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      double* g = y.GradBuffer();
      for (size_t i = 0; i < self.grad.size(); ++i)
        g[i] += self.grad[i] * x.value[i];
    }
  });
  auto& ov = out.node()->value;
  const auto av = a.values(), bv = b.values();
  for (size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  return out;
}

Var AddRow(const Var& a, const Var& row) {
  Require(row.rows() == 1 && row.cols() == a.cols(), "AddRow");
  Var out = MakeResult(a.rows(), a.cols(), {&a, &row}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& r = *self.inputs[1];
    if (x.requires_grad) Grads(x) += OutGrad(self);
    if (r.requires_grad) Grads(r) += OutGrad(self).colwise().sum();
  });
  Values(*out.node()) = a.mat().rowwise() + ConstMatMap(row.values().data(), 1,
                                                       row.cols())
                                                .row(0);
  return out;
}

Var Scale(const Var& a, double s) {
  return Unary(
      a, [s](double x) { return s * x; },
      [s](double, double) { return s; });
}

Var AddScalar(const Var& a, double s) {
  return Unary(
      a, [s](double x) { return x + s; },
      [](double, double) { return 1.0; });
}

Var Tanh(const Var& a) {
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(const Var& a) {
  return Unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Var Relu(const Var& a) {
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var LeakyRelu(const Var& a, double slope) {
  return Unary(
      a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var Dropout(const Var& a, double p, Rng& rng) {
  if (p <= 0.0) return a;
  auto mask = std::make_shared<std::vector<double>>(a.size());
  const double keep = 1.0 / (1.0 - p);
  for (double& m : *mask) m = UniformReal(rng) < p ? 0.0 : keep;
  Var out = MakeResult(a.rows(), a.cols(), {&a}, [mask](Node& self) {
    double* g = self.inputs[0]->GradBuffer();
    for (size_t i = 0; i < self.grad.size(); ++i)
      g[i] += self.grad[i] * (*mask)[i];
  });
  auto& ov = out.node()->value;
  const auto av = a.values();
  for (size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * (*mask)[i];
  return out;
}

Var Detach(const Var& a) {
  auto node = std::make_shared<Node>();
  node->rows = a.rows();
  node->cols = a.cols();
  node->value.assign(a.values().begin(), a.values().end());
  return Var(std::move(node));
}

Var SoftmaxRows(const Var& a) {
  Var out = MakeResult(a.rows(), a.cols(), {&a}, [](Node& self) {
    ConstMatMap y(self.value.data(), self.rows, self.cols);
    ConstMatMap g = OutGrad(self);
    MatMap gx = Grads(*self.inputs[0]);
    for (int r = 0; r < self.rows; ++r) {
      const double dot = y.row(r).dot(g.row(r));
      gx.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  });
  MatMap y = Values(*out.node());
  ConstMatMap x = a.mat();
  for (int r = 0; r < a.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return out;
}

Var LayerNormRows(const Var& a, const Var& gamma, const Var& beta,
                  double eps) {
  Require(gamma.rows() == 1 && gamma.cols() == a.cols() &&
              beta.rows() == 1 && beta.cols() == a.cols(),
          "LayerNormRows");
  const int n = a.cols();
  auto xhat = std::make_shared<RowMatrix>(a.rows(), n);
  auto inv_std = std::make_shared<Eigen::VectorXd>(a.rows());
  ConstMatMap x = a.mat();
  for (int r = 0; r < a.rows(); ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    (*inv_std)(r) = 1.0 / std::sqrt(var + eps);
    xhat->row(r) = (x.row(r).array() - mean) * (*inv_std)(r);
  }
  Var out = MakeResult(a.rows(), n, {&a, &gamma, &beta},
                       [xhat, inv_std](Node& self) {
    Node& in = *self.inputs[0];
    Node& gm = *self.inputs[1];
    Node& bt = *self.inputs[2];
    ConstMatMap g = OutGrad(self);
    if (gm.requires_grad)
      Grads(gm) += (g.array() * xhat->array()).colwise().sum().matrix();
    if (bt.requires_grad) Grads(bt) += g.colwise().sum();
    if (!in.requires_grad) return;
    MatMap gx = Grads(in);
    auto gam = Values(gm).row(0).array();
    for (int r = 0; r < self.rows; ++r) {
      Eigen::ArrayXd dxhat = (g.row(r).array() * gam).transpose();
      Eigen::ArrayXd xh = xhat->row(r).transpose().array();
      const double m1 = dxhat.mean();
      const double m2 = (dxhat * xh).mean();
      gx.row(r).array() +=
          ((dxhat - m1 - xh * m2) * (*inv_std)(r)).transpose();
    }
  });
  MatMap y = Values(*out.node());
  y = (xhat->array().rowwise() * gamma.mat().row(0).array()).matrix();
  y.rowwise() += beta.mat().row(0);
  return out;
}

Var InstanceNormCols(const Var& a, double eps) {
  const int rows = a.rows();
  auto xhat = std::make_shared<RowMatrix>(rows, a.cols());
  auto inv_std = std::make_shared<Eigen::VectorXd>(a.cols());
  ConstMatMap x = a.mat();
  for (int c = 0; c < a.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double var = (x.col(c).array() - mean).square().mean();
    (*inv_std)(c) = 1.0 / std::sqrt(var + eps);
    xhat->col(c) = (x.col(c).array() - mean) * (*inv_std)(c);
  }
  Var out = MakeResult(rows, a.cols(), {&a}, [xhat, inv_std](Node& self) {
    ConstMatMap g = OutGrad(self);
    MatMap gx = Grads(*self.inputs[0]);
    for (int c = 0; c < self.cols; ++c) {
      Eigen::ArrayXd dxhat = g.col(c).array();
      Eigen::ArrayXd xh = xhat->col(c).array();
      const double m1 = dxhat.mean();
      const double m2 = (dxhat * xh).mean();
      gx.col(c).array() += (dxhat - m1 - xh * m2) * (*inv_std)(c);
    }
  });
  Values(*out.node()) = *xhat;
  return out;
}

Var MeanRows(const Var& a) {
  Var out = MakeResult(1, a.cols(), {&a}, [](Node& self) {
    Node& in = *self.inputs[0];
    MatMap gx = Grads(in);
    gx.rowwise() += OutGrad(self).row(0) / static_cast<double>(in.rows);
  });
  Values(*out.node()) = a.mat().colwise().mean();
  return out;
}

Var SumAll(const Var& a) {
  Var out = MakeResult(1, 1, {&a}, [](Node& self) {
    double* g = self.inputs[0]->GradBuffer();
    const double s = self.grad[0];
    for (size_t i = 0; i < self.inputs[0]->value.size(); ++i) g[i] += s;
  });
  double s = 0.0;
  for (double v : a.values()) s += v;
  out.node()->value[0] = s;
  return out;
}

Var MeanAll(const Var& a) { return Scale(SumAll(a), 1.0 / a.size()); }

Var MeanAbsError(const Var& a, const Var& b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "MeanAbsError");
  Var out = MakeResult(1, 1, {&a, &b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    const double s = self.grad[0] / static_cast<double>(x.value.size());
    for (int k = 0; k < 2; ++k) {
      Node& in = *self.inputs[k];
      if (!in.requires_grad) continue;
      const double sign = k == 0 ? s : -s;
      double* g = in.GradBuffer();
      for (size_t i = 0; i < x.value.size(); ++i) {
        const double d = x.value[i] - y.value[i];
        g[i] += d > 0.0 ? sign : (d < 0.0 ? -sign : 0.0);
      }
    }
  });
  double s = 0.0;
  const auto av = a.values(), bv = b.values();
  for (size_t i = 0; i < av.size(); ++i) s += std::abs(av[i] - bv[i]);
  out.node()->value[0] = s / static_cast<double>(av.size());
  return out;
}

Var CosineEmbeddingLoss(const Var& a, const Var& b, double eps) {
  Require(a.size() == b.size(), "CosineEmbeddingLoss");
  const auto av = a.values(), bv = b.values();
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < av.size(); ++i) {
    dot += av[i] * bv[i];
    na += av[i] * av[i];
    nb += bv[i] * bv[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  const bool clamp_a = na < eps, clamp_b = nb < eps;
  const double ea = std::max(na, eps), eb = std::max(nb, eps);
  const double cos = dot / (ea * eb);
  Var out = MakeResult(1, 1, {&a, &b},
                       [=](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    const double g = -self.grad[0];
    // d cos / d a = b / (|a||b|) - cos * a / |a|^2 (norm term vanishes
    // when the norm is clamped)
    if (x.requires_grad) {
      double* gx = x.GradBuffer();
      for (size_t i = 0; i < x.value.size(); ++i) {
        double d = y.value[i] / (ea * eb);
        if (!clamp_a) d -= cos * x.value[i] / (ea * ea);
        gx[i] += g * d;
      }
    }
    if (y.requires_grad) {
      double* gy = y.GradBuffer();
      for (size_t i = 0; i < y.value.size(); ++i) {
        double d = x.value[i] / (ea * eb);
        if (!clamp_b) d -= cos * y.value[i] / (eb * eb);
        gy[i] += g * d;
      }
    }
  });
  out.node()->value[0] = 1.0 - cos;
  return out;
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidInput("ConcatCols: no inputs");
  const int rows = parts[0].rows();
  int cols = 0;
  for (const Var& p : parts) {
    Require(p.rows() == rows, "ConcatCols");
    cols += p.cols();
  }
  Var out = MakeResultN(rows, cols, parts, [](Node& self) {
    ConstMatMap g = OutGrad(self);
    int off = 0;
    for (auto& in : self.inputs) {
      if (in->requires_grad) Grads(*in) += g.middleCols(off, in->cols);
      off += in->cols;
    }
  });
  MatMap y = Values(*out.node());
  int off = 0;
  for (const Var& p : parts) {
    y.middleCols(off, p.cols()) = p.mat();
    off += p.cols();
  }
  return out;
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidInput("ConcatRows: no inputs");
  const int cols = parts[0].cols();
  int rows = 0;
  for (const Var& p : parts) {
    Require(p.cols() == cols, "ConcatRows");
    rows += p.rows();
  }
  Var out = MakeResultN(rows, cols, parts, [](Node& self) {
    ConstMatMap g = OutGrad(self);
    int off = 0;
    for (auto& in : self.inputs) {
      if (in->requires_grad) Grads(*in) += g.middleRows(off, in->rows);
      off += in->rows;
    }
  });
  auto& ov = out.node()->value;
  size_t off = 0;
  for (const Var& p : parts) {
    std::copy(p.values().begin(), p.values().end(), ov.begin() + off);
    off += p.size();
  }
  return out;
}

Var SliceRows(const Var& a, int start, int count) {
  Require(start >= 0 && count >= 0 && start + count <= a.rows(), "SliceRows");
  Var out = MakeResult(count, a.cols(), {&a}, [start](Node& self) {
    Grads(*self.inputs[0]).middleRows(start, self.rows) += OutGrad(self);
  });
  Values(*out.node()) = a.mat().middleRows(start, count);
  return out;
}

Var SliceCols(const Var& a, int start, int count) {
  Require(start >= 0 && count >= 0 && start + count <= a.cols(), "SliceCols");
  Var out = MakeResult(a.rows(), count, {&a}, [start](Node& self) {
    Grads(*self.inputs[0]).middleCols(start, self.cols) += OutGrad(self);
  });
  Values(*out.node()) = a.mat().middleCols(start, count);
  return out;
}

Var Reshape(const Var& a, int rows, int cols) {
  Require(static_cast<size_t>(rows) * cols == a.size(), "Reshape");
  Var out = MakeResult(rows, cols, {&a}, [](Node& self) {
    double* g = self.inputs[0]->GradBuffer();
    for (size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
  });
  std::copy(a.values().begin(), a.values().end(),
            out.node()->value.begin());
  return out;
}

Var PadRows(const Var& a, int total_rows) {
  Require(total_rows >= a.rows(), "PadRows");
  if (total_rows == a.rows()) return a;
  Var out = MakeResult(total_rows, a.cols(), {&a}, [](Node& self) {
    Node& in = *self.inputs[0];
    Grads(in) += OutGrad(self).topRows(in.rows);
  });
  std::copy(a.values().begin(), a.values().end(),
            out.node()->value.begin());
  return out;
}

Var GatherRows(const Var& table, std::span<const int> ids) {
  auto idx = std::make_shared<std::vector<int>>(ids.begin(), ids.end());
  for (int id : *idx)
    if (id < 0 || id >= table.rows())
      throw RangeError("GatherRows: index " + std::to_string(id) +
                       " out of range");
  const int n = table.cols();
  Var out = MakeResult(static_cast<int>(idx->size()), n, {&table},
                       [idx](Node& self) {
    MatMap gt = Grads(*self.inputs[0]);
    ConstMatMap g = OutGrad(self);
    for (size_t r = 0; r < idx->size(); ++r) gt.row((*idx)[r]) += g.row(r);
  });
  MatMap y = Values(*out.node());
  for (size_t r = 0; r < idx->size(); ++r) y.row(r) = table.mat().row((*idx)[r]);
  return out;
}

Var IndexGather(const Var& a, int rows, int cols,
                std::shared_ptr<const std::vector<int>> index) {
  Require(index->size() == static_cast<size_t>(rows) * cols, "IndexGather");
  Var out = MakeResult(rows, cols, {&a}, [index](Node& self) {
    double* g = self.inputs[0]->GradBuffer();
    for (size_t i = 0; i < index->size(); ++i) {
      const int j = (*index)[i];
      if (j >= 0) g[j] += self.grad[i];
    }
  });
  auto& ov = out.node()->value;
  const auto av = a.values();
  for (size_t i = 0; i < index->size(); ++i) {
    const int j = (*index)[i];
    ov[i] = j >= 0 ? av[j] : 0.0;
  }
  return out;
}

Var LstmRecurrence(const Var& gates_x, const Var& w_hh, bool reverse) {
  const int steps = gates_x.rows();
  const int hidden = w_hh.rows();
  Require(w_hh.cols() == 4 * hidden && gates_x.cols() == 4 * hidden,
          "LstmRecurrence");
  // Post-activation gates, cell states, and the previous hidden state per
  // processed step (in time order of the sequence).
  auto acts = std::make_shared<RowMatrix>(steps, 4 * hidden);
  auto cells = std::make_shared<RowMatrix>(steps, hidden);
  auto prev_h = std::make_shared<RowMatrix>(steps, hidden);
  auto prev_c = std::make_shared<RowMatrix>(steps, hidden);

  Var out = MakeResult(steps, hidden, {&gates_x, &w_hh},
                       [=](Node& self) {
    Node& gx_node = *self.inputs[0];
    Node& w_node = *self.inputs[1];
    ConstMatMap w(w_node.value.data(), hidden, 4 * hidden);
    ConstMatMap g = OutGrad(self);
    RowMatrix dz_all(steps, 4 * hidden);
    Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(hidden);
    Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(hidden);
    for (int k = steps - 1; k >= 0; --k) {
      const int t = reverse ? steps - 1 - k : k;
      auto a = acts->row(t).array();
      auto i = a.segment(0, hidden);
      auto f = a.segment(hidden, hidden);
      auto gg = a.segment(2 * hidden, hidden);
      auto o = a.segment(3 * hidden, hidden);
      RowArray tc = cells->row(t).array().tanh();
      Eigen::RowVectorXd dh = g.row(t) + dh_next;
      RowArray dha = dh.array();
      RowArray dc = dha * o * (1.0 - tc.square()) + dc_next.array();
      auto dz = dz_all.row(t).array();
      dz.segment(0, hidden) = dc * gg * i * (1.0 - i);
      dz.segment(hidden, hidden) =
          dc * prev_c->row(t).array() * f * (1.0 - f);
      dz.segment(2 * hidden, hidden) = dc * i * (1.0 - gg.square());
      dz.segment(3 * hidden, hidden) = dha * tc * o * (1.0 - o);
      dc_next = (dc * f).matrix();
      dh_next.noalias() = dz_all.row(t) * w.transpose();
    }
    if (gx_node.requires_grad) Grads(gx_node) += dz_all;
    if (w_node.requires_grad) Grads(w_node).noalias() += prev_h->transpose() * dz_all;
  });

  ConstMatMap gx = gates_x.mat();
  ConstMatMap w = w_hh.mat();
  MatMap y = Values(*out.node());
  Eigen::RowVectorXd h = Eigen::RowVectorXd::Zero(hidden);
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(hidden);
  Eigen::RowVectorXd z(4 * hidden);
  for (int k = 0; k < steps; ++k) {
    const int t = reverse ? steps - 1 - k : k;
    prev_h->row(t) = h;
    prev_c->row(t) = c;
    z.noalias() = gx.row(t) + h * w;
    auto a = acts->row(t).array();
    a.segment(0, 2 * hidden) =
        1.0 / (1.0 + (-z.segment(0, 2 * hidden).array()).exp());
    a.segment(2 * hidden, hidden) = z.segment(2 * hidden, hidden).array().tanh();
    a.segment(3 * hidden, hidden) =
        1.0 / (1.0 + (-z.segment(3 * hidden, hidden).array()).exp());
    c = (a.segment(hidden, hidden) * c.array() +
         a.segment(0, hidden) * a.segment(2 * hidden, hidden))
            .matrix();
    cells->row(t) = c;
    h = (a.segment(3 * hidden, hidden) * c.array().tanh()).matrix();
    y.row(t) = h;
  }
  return out;
}

}  // namespace rxvc::ag
