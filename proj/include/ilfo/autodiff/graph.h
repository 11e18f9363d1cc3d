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

#ifndef ILFO_AUTODIFF_GRAPH_H_
#define ILFO_AUTODIFF_GRAPH_H_

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ilfo/autodiff/parameters.h"
#include "ilfo/autodiff/tensor.h"

namespace ilfo {
class CounterRng;
}

namespace ilfo::ad {

class Graph;

enum class Op {
  kConstant,
  kVariable,
  kParameter,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kTanh,
  kLeakyRelu,
  kSigmoid,
  kLog,
  kAbs,
  kSquare,
  kSum,
  kMean,
  kConcat,
  kSliceCols,
  kConcatRows,
  kSliceRows,
  kDropout,
};

std::string_view OpName(Op op);

// Handle to a node of a Graph. Cheap to copy; valid while its graph lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  Op op() const;
  Graph* graph() const { return graph_; }
  std::size_t id() const { return id_; }

 private:
  friend class Graph;
  Var(Graph* g, std::size_t id) : graph_(g), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

// Define-by-run tape. Every op evaluates eagerly when it is recorded, so
// node ids are already a topological order and the graph cannot contain
// cycles. Build a fresh graph per batch.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf that never receives a gradient.
  Var Constant(Tensor value);
  // Leaf that receives a gradient but is not tied to a ParameterSet.
  Var Variable(Tensor value);
  // Leaf bound to `set[name]`. Repeated calls return the same node. The
  // leaf only receives a gradient when the entry is trainable at bind time.
  Var Parameter(const ParameterSet& set, const std::string& name);

  // Reverse pass from a 1x1 root. Resets all gradients first.
  void Backward(Var root);

  // d(root)/d(leaf) for every trainable parameter leaf, keyed by name.
  GradientMap ParameterGradients() const;

  std::size_t size() const { return nodes_.size(); }

  // Interface for op implementations.
  Var Record(Op op, Tensor value, std::vector<std::size_t> parents,
             BackwardFn backward);
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
  Tensor& mutable_grad(std::size_t id) { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const std::vector<std::size_t>& parents(std::size_t id) const {
    return nodes_[id].parents;
  }
  Op op(std::size_t id) const { return nodes_[id].op; }

 private:
  struct Node {
    Op op;
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> parents;
    bool requires_grad = false;
    BackwardFn backward;
    std::string param_name;
  };
  Var Leaf(Op op, Tensor value, bool requires_grad, std::string param_name);

  std::vector<Node> nodes_;
  std::map<std::pair<const ParameterSet*, std::string>, std::size_t> bound_;
};

// The root's data. Evaluation already happened when the graph was built.
inline const Tensor& Forward(Var root) { return root.value(); }

// ---- primitives -----------------------------------------------------------
// Binary elementwise ops accept b as a 1 x n row broadcast over a's rows.

Var MatMul(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double k);
Var AddScalar(Var a, double k);
Var Tanh(Var a);
Var LeakyRelu(Var a, double slope = 0.01);
Var Sigmoid(Var a);
Var Log(Var a);
Var Abs(Var a);
Var Square(Var a);
Var Sum(Var a);
Var Mean(Var a);
// Column-wise concatenation; all parts must have the same row count.
Var ConcatCols(const std::vector<Var>& parts);
Var SliceCols(Var a, std::size_t begin, std::size_t count);
// Row-wise concatenation; all parts must have the same column count.
Var ConcatRows(const std::vector<Var>& parts);
Var SliceRows(Var a, std::size_t begin, std::size_t count);
// Inverted dropout with a caller-supplied 0/1 mask: a * mask / (1 - p).
Var Dropout(Var a, const Tensor& mask, double p);

Tensor DropoutMask(Shape shape, double p, CounterRng& rng);

inline Var operator+(Var a, Var b) { return Add(a, b); }
inline Var operator-(Var a, Var b) { return Sub(a, b); }
inline Var operator*(Var a, Var b) { return Mul(a, b); }
inline Var operator*(double k, Var a) { return Scale(a, k); }
inline Var operator-(Var a) { return Scale(a, -1.0); }
inline Var operator+(Var a, double k) { return AddScalar(a, k); }
inline Var operator-(double k, Var a) { return AddScalar(Scale(a, -1.0), k); }

// Standard LSTM cell with gate order (input, forget, candidate, output):
//   z = x Wx + h Wh + b
//   c' = sigmoid(z_f) * c + sigmoid(z_i) * tanh(z_g)
//   h' = sigmoid(z_o) * tanh(c')
struct LstmWeights {
  Var input;   // in x 4H
  Var hidden;  // H x 4H
  Var bias;    // 1 x 4H
};
struct LstmState {
  Var h;
  Var c;
};
LstmState LstmCell(Var x, const LstmState& state, const LstmWeights& w);

}  // namespace ilfo::ad

#endif  // ILFO_AUTODIFF_GRAPH_H_
