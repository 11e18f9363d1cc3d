// Copyright 2026 The ilfo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ilfo/autodiff/graph.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <utility>

#include "ilfo/errors.h"
#include "ilfo/random.h"

namespace ilfo::ad {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap AsMatrix(const Tensor& t) {
  return ConstMap(t.values().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}
MutMap AsMatrix(Tensor& t) {
  return MutMap(t.values().data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

Graph& SameGraph(Var a, Var b) {
  if (a.graph() == nullptr || a.graph() != b.graph()) {
    throw ContractError("operands belong to different graphs");
  }
  return *a.graph();
}

[[noreturn]] void ThrowShapes(std::string_view op, const Shape& a,
                              const Shape& b) {
  throw DimensionError(std::string(op) + ": shape mismatch " + a.ToString() +
                       " vs " + b.ToString());
}

// True when b broadcasts as a row over a; throws when shapes are
// incompatible.
bool CheckElementwise(std::string_view op, const Shape& a, const Shape& b) {
  if (a == b) return false;
  if (b.rows == 1 && b.cols == a.cols) return true;
  ThrowShapes(op, a, b);
}

// Accumulates `g` (shape of the output) into the gradient of a parent of
// shape `target`, summing over broadcast rows.
void AccumulateBroadcast(Tensor& target, const Tensor& g, bool broadcast) {
  if (!broadcast) {
    for (std::size_t i = 0; i < g.size(); ++i) target[i] += g[i];
    return;
  }
  const std::size_t cols = g.cols();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) target[c] += g(r, c);
  }
}

// Unary elementwise op given value and local derivative as functions of
// (input, output).
template <class F, class DF>
Var Unary(Op op, Var a, F f, DF df) {
  Graph& g = *a.graph();
  Tensor out(a.shape());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  const std::size_t pa = a.id();
  return g.Record(op, std::move(out), {pa}, [pa, df](Graph& gr, std::size_t self) {
    if (!gr.requires_grad(pa)) return;
    const Tensor& x = gr.value(pa);
    const Tensor& y = gr.value(self);
    const Tensor& gy = gr.grad(self);
    Tensor& gx = gr.mutable_grad(pa);
    for (std::size_t i = 0; i < x.size(); ++i) gx[i] += gy[i] * df(x[i], y[i]);
  });
}

}  // namespace

std::string_view OpName(Op op) {
  switch (op) {
    case Op::kConstant: return "constant";
    case Op::kVariable: return "variable";
    case Op::kParameter: return "parameter";
    case Op::kMatMul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kTanh: return "tanh";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kSigmoid: return "sigmoid";
    case Op::kLog: return "log";
    case Op::kAbs: return "abs";
    case Op::kSquare: return "square";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kConcat: return "concat";
    case Op::kSliceCols: return "slice_cols";
    case Op::kConcatRows: return "concat_rows";
    case Op::kSliceRows: return "slice_rows";
    case Op::kDropout: return "dropout";
  }
  return "unknown";
}

const Tensor& Var::value() const { return graph_->value(id_); }
const Tensor& Var::grad() const { return graph_->grad(id_); }
Op Var::op() const { return graph_->op(id_); }

Var Graph::Leaf(Op op, Tensor value, bool requires_grad,
                std::string param_name) {
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.param_name = std::move(param_name);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::Constant(Tensor value) {
  return Leaf(Op::kConstant, std::move(value), false, {});
}

Var Graph::Variable(Tensor value) {
  return Leaf(Op::kVariable, std::move(value), true, {});
}

Var Graph::Parameter(const ParameterSet& set, const std::string& name) {
  auto key = std::make_pair(&set, name);
  if (auto it = bound_.find(key); it != bound_.end()) {
    return Var(this, it->second);
  }
  Var v = Leaf(Op::kParameter, set.Get(name), set.trainable(name), name);
  bound_.emplace(std::move(key), v.id());
  return v;
}

Var Graph::Record(Op op, Tensor value, std::vector<std::size_t> parents,
                  BackwardFn backward) {
  Node n;
  n.op = op;
  n.value = std::move(value);
  for (std::size_t p : parents) n.requires_grad |= nodes_[p].requires_grad;
  n.parents = std::move(parents);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Graph::Backward(Var root) {
  if (root.graph() != this) throw ContractError("root from another graph");
  if (root.shape().size() != 1) {
    throw ContractError("backward requires a scalar root, got shape " +
                        root.shape().ToString());
  }
  for (auto& n : nodes_) {
    if (n.requires_grad) {
      n.grad = Tensor(n.value.shape());
    } else {
      n.grad = Tensor();
    }
  }
  if (!nodes_[root.id()].requires_grad) return;
  nodes_[root.id()].grad[0] = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    if (nodes_[i].requires_grad && nodes_[i].backward) {
      nodes_[i].backward(*this, i);
    }
  }
}

GradientMap Graph::ParameterGradients() const {
  GradientMap out;
  for (const auto& n : nodes_) {
    if (n.op != Op::kParameter || !n.requires_grad) continue;
    auto [it, inserted] = out.emplace(n.param_name, n.grad);
    if (!inserted) {
      // Same name bound from two different sets.
      for (std::size_t i = 0; i < n.grad.size(); ++i) it->second[i] += n.grad[i];
    }
  }
  return out;
}

// ---- primitives -----------------------------------------------------------

Var MatMul(Var a, Var b) {
  Graph& g = SameGraph(a, b);
  if (a.shape().cols != b.shape().rows) ThrowShapes("matmul", a.shape(), b.shape());
  Tensor out({a.shape().rows, b.shape().cols});
  AsMatrix(out).noalias() = AsMatrix(a.value()) * AsMatrix(b.value());
  const std::size_t pa = a.id(), pb = b.id();
  return g.Record(Op::kMatMul, std::move(out), {pa, pb},
                  [pa, pb](Graph& gr, std::size_t self) {
                    const auto gy = AsMatrix(gr.grad(self));
                    if (gr.requires_grad(pa)) {
                      AsMatrix(gr.mutable_grad(pa)).noalias() +=
                          gy * AsMatrix(gr.value(pb)).transpose();
                    }
                    if (gr.requires_grad(pb)) {
                      AsMatrix(gr.mutable_grad(pb)).noalias() +=
                          AsMatrix(gr.value(pa)).transpose() * gy;
                    }
                  });
}

Var Add(Var a, Var b) {
  Graph& g = SameGraph(a, b);
  const bool bc = CheckElementwise("add", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) += bc ? b.value()[c] : b.value()(r, c);
  const std::size_t pa = a.id(), pb = b.id();
  return g.Record(Op::kAdd, std::move(out), {pa, pb},
                  [pa, pb, bc](Graph& gr, std::size_t self) {
                    const Tensor& gy = gr.grad(self);
                    if (gr.requires_grad(pa))
                      AccumulateBroadcast(gr.mutable_grad(pa), gy, false);
                    if (gr.requires_grad(pb))
                      AccumulateBroadcast(gr.mutable_grad(pb), gy, bc);
                  });
}

Var Sub(Var a, Var b) {
  Graph& g = SameGraph(a, b);
  const bool bc = CheckElementwise("sub", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) -= bc ? b.value()[c] : b.value()(r, c);
  const std::size_t pa = a.id(), pb = b.id();
  return g.Record(Op::kSub, std::move(out), {pa, pb},
                  [pa, pb, bc](Graph& gr, std::size_t self) {
                    const Tensor& gy = gr.grad(self);
                    if (gr.requires_grad(pa))
                      AccumulateBroadcast(gr.mutable_grad(pa), gy, false);
                    if (gr.requires_grad(pb)) {
                      Tensor neg = gy;
                      for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -neg[i];
                      AccumulateBroadcast(gr.mutable_grad(pb), neg, bc);
                    }
                  });
}

Var Mul(Var a, Var b) {
  Graph& g = SameGraph(a, b);
  const bool bc = CheckElementwise("mul", a.shape(), b.shape());
  Tensor out = a.value();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) *= bc ? b.value()[c] : b.value()(r, c);
  const std::size_t pa = a.id(), pb = b.id();
  return g.Record(
      Op::kMul, std::move(out), {pa, pb}, [pa, pb, bc](Graph& gr, std::size_t self) {
        const Tensor& gy = gr.grad(self);
        const Tensor& av = gr.value(pa);
        const Tensor& bv = gr.value(pb);
        const std::size_t cols = gy.cols();
        if (gr.requires_grad(pa)) {
          Tensor& ga = gr.mutable_grad(pa);
          for (std::size_t r = 0; r < gy.rows(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
              ga(r, c) += gy(r, c) * (bc ? bv[c] : bv(r, c));
        }
        if (gr.requires_grad(pb)) {
          Tensor& gb = gr.mutable_grad(pb);
          for (std::size_t r = 0; r < gy.rows(); ++r)
            for (std::size_t c = 0; c < cols; ++c) {
              const double d = gy(r, c) * av(r, c);
              if (bc) {
                gb[c] += d;
              } else {
                gb(r, c) += d;
              }
            }
        }
      });
}

Var Scale(Var a, double k) {
  return Unary(
      Op::kScale, a, [k](double x) { return k * x; },
      [k](double, double) { return k; });
}

Var AddScalar(Var a, double k) {
  return Unary(
      Op::kAddScalar, a, [k](double x) { return x + k; },
      [](double, double) { return 1.0; });
}

Var Tanh(Var a) {
  return Unary(
      Op::kTanh, a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var LeakyRelu(Var a, double slope) {
  return Unary(
      Op::kLeakyRelu, a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var Sigmoid(Var a) {
  return Unary(
      Op::kSigmoid, a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var Log(Var a) {
  return Unary(
      Op::kLog, a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var Abs(Var a) {
  return Unary(
      Op::kAbs, a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var Square(Var a) {
  return Unary(
      Op::kSquare, a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var Sum(Var a) {
  Graph& g = *a.graph();
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t pa = a.id();
  return g.Record(Op::kSum, Tensor::Scalar(s), {pa}, [pa](Graph& gr, std::size_t self) {
    if (!gr.requires_grad(pa)) return;
    const double gy = gr.grad(self)[0];
    for (double& v : gr.mutable_grad(pa).values()) v += gy;
  });
}

Var Mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw EmptyInputError("mean of an empty tensor");
  Graph& g = *a.graph();
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t pa = a.id();
  return g.Record(Op::kMean, Tensor::Scalar(s / static_cast<double>(n)), {pa},
                  [pa, n](Graph& gr, std::size_t self) {
                    if (!gr.requires_grad(pa)) return;
                    const double gy = gr.grad(self)[0] / static_cast<double>(n);
                    for (double& v : gr.mutable_grad(pa).values()) v += gy;
                  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw EmptyInputError("concat of zero tensors");
  Graph& g = *parts.front().graph();
  const std::size_t rows = parts.front().shape().rows;
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.graph() != &g) throw ContractError("operands belong to different graphs");
    if (p.shape().rows != rows) ThrowShapes("concat", parts.front().shape(), p.shape());
    cols += p.shape().cols;
    ids.push_back(p.id());
  }
  Tensor out({rows, cols});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, offset + c) = v(r, c);
    offset += v.cols();
  }
  return g.Record(Op::kConcat, std::move(out), ids, [ids](Graph& gr, std::size_t self) {
    const Tensor& gy = gr.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t w = gr.value(id).cols();
      if (gr.requires_grad(id)) {
        Tensor& gp = gr.mutable_grad(id);
        for (std::size_t r = 0; r < gy.rows(); ++r)
          for (std::size_t c = 0; c < w; ++c) gp(r, c) += gy(r, offset + c);
      }
      offset += w;
    }
  });
}

Var SliceCols(Var a, std::size_t begin, std::size_t count) {
  if (begin + count > a.shape().cols) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " +
                         a.shape().ToString());
  }
  Graph& g = *a.graph();
  const Tensor& x = a.value();
  Tensor out({x.rows(), count});
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = x(r, begin + c);
  const std::size_t pa = a.id();
  return g.Record(Op::kSliceCols, std::move(out), {pa},
                  [pa, begin, count](Graph& gr, std::size_t self) {
                    if (!gr.requires_grad(pa)) return;
                    const Tensor& gy = gr.grad(self);
                    Tensor& gx = gr.mutable_grad(pa);
                    for (std::size_t r = 0; r < gy.rows(); ++r)
                      for (std::size_t c = 0; c < count; ++c)
                        gx(r, begin + c) += gy(r, c);
                  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw EmptyInputError("concat of zero tensors");
  Graph& g = *parts.front().graph();
  const std::size_t cols = parts.front().shape().cols;
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.graph() != &g) throw ContractError("operands belong to different graphs");
    if (p.shape().cols != cols) ThrowShapes("concat_rows", parts.front().shape(), p.shape());
    rows += p.shape().rows;
    ids.push_back(p.id());
  }
  Tensor out({rows, cols});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    std::copy(p.value().values().begin(), p.value().values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.value().size();
  }
  return g.Record(Op::kConcatRows, std::move(out), ids, [ids](Graph& gr, std::size_t self) {
    const Tensor& gy = gr.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t n = gr.value(id).size();
      if (gr.requires_grad(id)) {
        Tensor& gp = gr.mutable_grad(id);
        for (std::size_t i = 0; i < n; ++i) gp[i] += gy[offset + i];
      }
      offset += n;
    }
  });
}

Var SliceRows(Var a, std::size_t begin, std::size_t count) {
  if (begin + count > a.shape().rows) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " +
                         a.shape().ToString());
  }
  Graph& g = *a.graph();
  const std::size_t cols = a.shape().cols;
  const auto first = a.value().values().begin() + static_cast<std::ptrdiff_t>(begin * cols);
  Tensor out({count, cols}, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * cols)));
  const std::size_t pa = a.id();
  return g.Record(Op::kSliceRows, std::move(out), {pa},
                  [pa, begin, cols](Graph& gr, std::size_t self) {
                    if (!gr.requires_grad(pa)) return;
                    const Tensor& gy = gr.grad(self);
                    Tensor& gx = gr.mutable_grad(pa);
                    for (std::size_t i = 0; i < gy.size(); ++i) gx[begin * cols + i] += gy[i];
                  });
}

Var Dropout(Var a, const Tensor& mask, double p) {
  if (!(mask.shape() == a.shape())) ThrowShapes("dropout", a.shape(), mask.shape());
  if (!(p >= 0.0 && p < 1.0)) {
    throw ContractError("dropout probability must be in [0, 1)");
  }
  Tensor scaled = mask;
  const double k = 1.0 / (1.0 - p);
  for (double& v : scaled.values()) v *= k;
  Graph& g = *a.graph();
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scaled[i];
  const std::size_t pa = a.id();
  return g.Record(Op::kDropout, std::move(out), {pa},
                  [pa, scaled = std::move(scaled)](Graph& gr, std::size_t self) {
                    if (!gr.requires_grad(pa)) return;
                    const Tensor& gy = gr.grad(self);
                    Tensor& gx = gr.mutable_grad(pa);
                    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * scaled[i];
                  });
}

Tensor DropoutMask(Shape shape, double p, CounterRng& rng) {
  Tensor mask(shape);
  for (double& v : mask.values()) v = rng.Uniform() < p ? 0.0 : 1.0;
  return mask;
}

LstmState LstmCell(Var x, const LstmState& state, const LstmWeights& w) {
  const std::size_t h = state.h.shape().cols;
  if (w.hidden.shape() != Shape{h, 4 * h}) {
    ThrowShapes("lstm hidden weights", w.hidden.shape(), Shape{h, 4 * h});
  }
  Var z = MatMul(x, w.input) + MatMul(state.h, w.hidden) + w.bias;
  Var in_gate = Sigmoid(SliceCols(z, 0, h));
  Var forget_gate = Sigmoid(SliceCols(z, h, h));
  Var candidate = Tanh(SliceCols(z, 2 * h, h));
  Var out_gate = Sigmoid(SliceCols(z, 3 * h, h));
  Var c = forget_gate * state.c + in_gate * candidate;
  return {out_gate * Tanh(c), c};
}

}  // namespace ilfo::ad
