// Copyright 2026 The tivc Authors
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

#ifndef TIVC_DIFFCORE_HPP_
#define TIVC_DIFFCORE_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tivc/common.hpp"

namespace tivc {

// Handle to a scalar recorded on a Tape.
struct Var {
  int32_t index = -1;
  bool valid() const { return index >= 0; }
};

// value of the sigmoid primitive; shared so every evaluation path agrees
inline double SigmoidValue(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Eager reverse-mode tape. Gradient() emits the backward pass as ordinary
// tape operations, so gradients are themselves differentiable — that is what
// carries outer-loop gradients through N unrolled inner descent steps.
// A tape is single-use and single-threaded; independent tapes may run on
// separate threads.
class Tape {
 public:
  Var leaf(double value) { return Push(Op::kLeaf, -1, -1, 0.0, value); }
  Var constant(double value) { return Push(Op::kConst, -1, -1, 0.0, value); }

  Var add(Var a, Var b) {
    return Push(Op::kAdd, a.index, b.index, 0.0, val(a) + val(b));
  }
  Var sub(Var a, Var b) {
    return Push(Op::kSub, a.index, b.index, 0.0, val(a) - val(b));
  }
  Var mul(Var a, Var b) {
    return Push(Op::kMul, a.index, b.index, 0.0, val(a) * val(b));
  }
  Var div(Var a, Var b) {
    return Push(Op::kDiv, a.index, b.index, 0.0, val(a) / val(b));
  }
  Var neg(Var a) { return Push(Op::kNeg, a.index, -1, 0.0, -val(a)); }
  Var exp(Var a) { return Push(Op::kExp, a.index, -1, 0.0, std::exp(val(a))); }
  Var sin(Var a) { return Push(Op::kSin, a.index, -1, 0.0, std::sin(val(a))); }
  Var cos(Var a) { return Push(Op::kCos, a.index, -1, 0.0, std::cos(val(a))); }
  Var sigmoid(Var a) {
    return Push(Op::kSigmoid, a.index, -1, 0.0, SigmoidValue(val(a)));
  }
  Var add_const(Var a, double c) {
    return Push(Op::kAddConst, a.index, -1, c, val(a) + c);
  }
  Var mul_const(Var a, double c) {
    return Push(Op::kMulConst, a.index, -1, c, val(a) * c);
  }
  Var square(Var a) {
    return Push(Op::kSquare, a.index, -1, 0.0, val(a) * val(a));
  }
  // fused a + c * b; the workhorse of rollouts and kernel-weight sums
  Var axpy_const(Var a, Var b, double c) {
    return Push(Op::kAxpyConst, a.index, b.index, c, val(a) + c * val(b));
  }
  // fused a + b * x
  Var mul_add(Var a, Var b, Var x) {
    return Push(Op::kMulAdd, a.index, b.index, x.index,
                val(a) + val(b) * val(x));
  }

  std::vector<Var> leaves(std::span<const double> values);

  double value(Var v) const { return nodes_[static_cast<size_t>(v.index)].value; }
  int64_t size() const { return static_cast<int64_t>(nodes_.size()); }
  void reserve(size_t n) { nodes_.reserve(n); }

  // Adjoints of `output` w.r.t. `inputs`, recorded back onto the tape as
  // ordinary operations; the returned Vars may be differentiated again.
  std::vector<Var> Gradient(Var output, std::span<const Var> inputs);

  // Same traversal with plain doubles; no nodes are emitted. Accumulation
  // order matches Gradient() exactly, so the two paths agree bit-for-bit.
  std::vector<double> GradientValues(Var output,
                                     std::span<const Var> inputs) const;

 private:
  enum class Op : uint8_t {
    kConst,
    kLeaf,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kExp,
    kSin,
    kCos,
    kSigmoid,
    kAddConst,
    kMulConst,
    kSquare,
    kAxpyConst,  // a + c * b
    kMulAdd,     // a + b * x, third parent in x
  };
  struct Node {
    Op op;
    int32_t a;
    int32_t b;
    int32_t x;
    double c;
    double value;
  };

  Var Push(Op op, int32_t a, int32_t b, double c, double value) {
    nodes_.push_back(Node{op, a, b, -1, c, value});
    return Var{static_cast<int32_t>(nodes_.size()) - 1};
  }
  Var Push(Op op, int32_t a, int32_t b, int32_t x, double value) {
    nodes_.push_back(Node{op, a, b, x, 0.0, value});
    return Var{static_cast<int32_t>(nodes_.size()) - 1};
  }
  double val(Var v) const { return nodes_[static_cast<size_t>(v.index)].value; }

  std::vector<Node> nodes_;
};

// scalar built from leaf inputs on a tape
using TapeFn = std::function<Var(Tape&, std::span<const Var>)>;

// scalar of (params, actions), used by the bi-level routines
using BilevelFn =
    std::function<Var(Tape&, std::span<const Var>, std::span<const Var>)>;

// analytic-vs-central-difference comparison for one evaluation point
struct GradientReport {
  std::vector<double> analytic;
  std::vector<double> numeric;
  double max_rel_error = 0.0;
  double eps = 0.0;
  bool all_finite = true;
};

// max_i |a_i - b_i| / max(|a_i|, |b_i|, 1e-8)
double MaxRelError(std::span<const double> a, std::span<const double> b);

// Gradient of a tape-built scalar with respect to its inputs. Throws
// NumericError when the value or a gradient entry is non-finite, naming the
// offending index.
std::vector<double> CostGradient(const TapeFn& fn, std::span<const double> x);

// value of a tape-built scalar at a point
double EvaluateFn(const TapeFn& fn, std::span<const double> x);

// Analytic gradient next to a central-difference one, eps > 0 required.
// Non-finite entries are flagged in the report rather than thrown.
GradientReport CheckGradient(const TapeFn& fn, std::span<const double> x,
                             double eps);

struct InnerLoopConfig {
  int steps = 5;      // gradient-descent iterations on the actions
  double alpha = 0.01;  // inner step size
};

struct BilevelResult {
  std::vector<double> param_gradient;  // d outer_loss / d params, unrolled
  std::vector<double> final_actions;   // actions after the inner loop
  double outer_loss = 0.0;
};

// Outer gradient through `steps` unrolled inner descent iterations: each
// iteration rebuilds the cost from the current actions and takes one step
// along its (differentiable) action gradient; the returned parameter
// gradient includes the cross terms from every iteration, not just the last.
// Throws NumericError if an inner iterate goes non-finite.
BilevelResult BilevelGradient(std::span<const double> params,
                              std::span<const double> actions0,
                              const InnerLoopConfig& config,
                              const BilevelFn& inner_cost,
                              const BilevelFn& outer_loss);

// Value of the same composed objective with a plain (non-differentiable)
// inner loop; the finite-difference oracle for BilevelGradient.
double BilevelObjective(std::span<const double> params,
                        std::span<const double> actions0,
                        const InnerLoopConfig& config,
                        const BilevelFn& inner_cost,
                        const BilevelFn& outer_loss);

// Plain inner loop: returns the actions after `steps` descent iterations.
std::vector<double> OptimizeActions(std::span<const double> params,
                                    std::span<const double> actions0,
                                    const InnerLoopConfig& config,
                                    const BilevelFn& inner_cost);

}  // namespace tivc

#endif  // TIVC_DIFFCORE_HPP_
