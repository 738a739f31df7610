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

#include "tivc/diffcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tivc {

std::vector<Var> Tape::leaves(std::span<const double> values) {
  std::vector<Var> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(leaf(v));
  return out;
}

std::vector<Var> Tape::Gradient(Var output, std::span<const Var> inputs) {
  const int32_t n = output.index + 1;
  // -1 marks "no contribution yet"; the first contribution assigns, later
  // ones fold in with fused ops. GradientValues mirrors this order exactly.
  std::vector<int32_t> adjoint(static_cast<size_t>(n), -1);
  adjoint[static_cast<size_t>(output.index)] = constant(1.0).index;

  auto accumulate = [&](int32_t parent, Var term) {
    int32_t& slot = adjoint[static_cast<size_t>(parent)];
    slot = slot < 0 ? term.index : add(Var{slot}, term).index;
  };
  // adjoint[parent] += d * x
  auto accumulate_prod = [&](int32_t parent, Var d, Var x) {
    int32_t& slot = adjoint[static_cast<size_t>(parent)];
    slot = slot < 0 ? mul(d, x).index : mul_add(Var{slot}, d, x).index;
  };
  // adjoint[parent] += d * c
  auto accumulate_scaled = [&](int32_t parent, Var d, double c) {
    int32_t& slot = adjoint[static_cast<size_t>(parent)];
    slot = slot < 0 ? mul_const(d, c).index
                    : axpy_const(Var{slot}, d, c).index;
  };

  for (int32_t i = n - 1; i >= 0; --i) {
    if (adjoint[static_cast<size_t>(i)] < 0) continue;
    // copy: emission below may reallocate nodes_
    const Node node = nodes_[static_cast<size_t>(i)];
    const Var d{adjoint[static_cast<size_t>(i)]};
    switch (node.op) {
      case Op::kAdd:
        accumulate(node.a, d);
        accumulate(node.b, d);
        break;
      case Op::kSub:
        accumulate(node.a, d);
        accumulate_scaled(node.b, d, -1.0);
        break;
      case Op::kMul:
        accumulate_prod(node.a, d, Var{node.b});
        accumulate_prod(node.b, d, Var{node.a});
        break;
      case Op::kDiv:
        accumulate(node.a, div(d, Var{node.b}));
        accumulate(node.b, neg(div(mul(d, Var{i}), Var{node.b})));
        break;
      case Op::kNeg:
        accumulate(node.a, neg(d));
        break;
      case Op::kExp:
        accumulate_prod(node.a, d, Var{i});
        break;
      case Op::kSin:
        accumulate_prod(node.a, d, cos(Var{node.a}));
        break;
      case Op::kCos:
        accumulate(node.a, neg(mul(d, sin(Var{node.a}))));
        break;
      case Op::kSigmoid: {
        const Var s{i};
        const Var one_minus = add_const(mul_const(s, -1.0), 1.0);
        accumulate_prod(node.a, d, mul(s, one_minus));
        break;
      }
      case Op::kAddConst:
        accumulate(node.a, d);
        break;
      case Op::kMulConst:
        accumulate_scaled(node.a, d, node.c);
        break;
      case Op::kSquare:
        accumulate_scaled(node.a, mul(d, Var{node.a}), 2.0);
        break;
      case Op::kAxpyConst:
        accumulate(node.a, d);
        accumulate_scaled(node.b, d, node.c);
        break;
      case Op::kMulAdd:
        accumulate(node.a, d);
        accumulate_prod(node.b, d, Var{node.x});
        accumulate_prod(node.x, d, Var{node.b});
        break;
      case Op::kConst:
      case Op::kLeaf:
        break;
    }
  }

  std::vector<Var> out;
  out.reserve(inputs.size());
  for (Var x : inputs) {
    const int32_t a = x.index < n ? adjoint[static_cast<size_t>(x.index)] : -1;
    out.push_back(a < 0 ? constant(0.0) : Var{a});
  }
  return out;
}

std::vector<double> Tape::GradientValues(Var output,
                                         std::span<const Var> inputs) const {
  const int32_t n = output.index + 1;
  std::vector<double> adjoint(static_cast<size_t>(n), 0.0);
  std::vector<char> seen(static_cast<size_t>(n), 0);
  adjoint[static_cast<size_t>(output.index)] = 1.0;
  seen[static_cast<size_t>(output.index)] = 1;

  auto accumulate = [&](int32_t parent, double term) {
    const size_t p = static_cast<size_t>(parent);
    if (seen[p]) {
      adjoint[p] += term;
    } else {
      adjoint[p] = term;
      seen[p] = 1;
    }
  };

  for (int32_t i = n - 1; i >= 0; --i) {
    if (!seen[static_cast<size_t>(i)]) continue;
    const Node& node = nodes_[static_cast<size_t>(i)];
    const double d = adjoint[static_cast<size_t>(i)];
    const double vi = nodes_[static_cast<size_t>(i)].value;
    switch (node.op) {
      case Op::kAdd:
        accumulate(node.a, d);
        accumulate(node.b, d);
        break;
      case Op::kSub:
        accumulate(node.a, d);
        accumulate(node.b, d * -1.0);
        break;
      case Op::kMul:
        accumulate(node.a, d * nodes_[static_cast<size_t>(node.b)].value);
        accumulate(node.b, d * nodes_[static_cast<size_t>(node.a)].value);
        break;
      case Op::kDiv:
        accumulate(node.a, d / nodes_[static_cast<size_t>(node.b)].value);
        accumulate(node.b,
                   -((d * vi) / nodes_[static_cast<size_t>(node.b)].value));
        break;
      case Op::kNeg:
        accumulate(node.a, -d);
        break;
      case Op::kExp:
        accumulate(node.a, d * vi);
        break;
      case Op::kSin:
        accumulate(node.a,
                   d * std::cos(nodes_[static_cast<size_t>(node.a)].value));
        break;
      case Op::kCos:
        accumulate(node.a,
                   -(d * std::sin(nodes_[static_cast<size_t>(node.a)].value)));
        break;
      case Op::kSigmoid:
        accumulate(node.a, d * (vi * (vi * -1.0 + 1.0)));
        break;
      case Op::kAddConst:
        accumulate(node.a, d);
        break;
      case Op::kMulConst:
        accumulate(node.a, d * node.c);
        break;
      case Op::kSquare:
        accumulate(node.a, (d * nodes_[static_cast<size_t>(node.a)].value) * 2.0);
        break;
      case Op::kAxpyConst:
        accumulate(node.a, d);
        accumulate(node.b, d * node.c);
        break;
      case Op::kMulAdd:
        accumulate(node.a, d);
        accumulate(node.b, d * nodes_[static_cast<size_t>(node.x)].value);
        accumulate(node.x, d * nodes_[static_cast<size_t>(node.b)].value);
        break;
      case Op::kConst:
      case Op::kLeaf:
        break;
    }
  }

  std::vector<double> out;
  out.reserve(inputs.size());
  for (Var x : inputs) {
    out.push_back(x.index < n && seen[static_cast<size_t>(x.index)]
                      ? adjoint[static_cast<size_t>(x.index)]
                      : 0.0);
  }
  return out;
}

double MaxRelError(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("MaxRelError: length mismatch");
  }
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double denom =
        std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-8});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

std::vector<double> CostGradient(const TapeFn& fn, std::span<const double> x) {
  Tape tape;
  const std::vector<Var> inputs = tape.leaves(x);
  const Var y = fn(tape, inputs);
  if (!std::isfinite(tape.value(y))) {
    throw NumericError("cost value is non-finite at evaluation point");
  }
  std::vector<double> grad = tape.GradientValues(y, inputs);
  for (size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericError("non-finite gradient entry at index " +
                         std::to_string(i));
    }
  }
  return grad;
}

double EvaluateFn(const TapeFn& fn, std::span<const double> x) {
  Tape tape;
  const std::vector<Var> inputs = tape.leaves(x);
  return tape.value(fn(tape, inputs));
}

GradientReport CheckGradient(const TapeFn& fn, std::span<const double> x,
                             double eps) {
  if (!(eps > 0.0)) throw ArgumentError("CheckGradient: eps must be > 0");

  GradientReport report;
  report.eps = eps;
  {
    Tape tape;
    const std::vector<Var> inputs = tape.leaves(x);
    const Var y = fn(tape, inputs);
    report.analytic = tape.GradientValues(y, inputs);
  }

  std::vector<double> point(x.begin(), x.end());
  report.numeric.resize(point.size());
  for (size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + eps;
    const double hi = EvaluateFn(fn, point);
    point[i] = saved - eps;
    const double lo = EvaluateFn(fn, point);
    point[i] = saved;
    report.numeric[i] = (hi - lo) / (2.0 * eps);
  }

  for (size_t i = 0; i < point.size(); ++i) {
    if (!std::isfinite(report.analytic[i]) ||
        !std::isfinite(report.numeric[i])) {
      report.all_finite = false;
    }
  }
  report.max_rel_error =
      report.all_finite
          ? MaxRelError(report.analytic, report.numeric)
          : std::numeric_limits<double>::infinity();
  return report;
}

namespace {

void RequireFiniteActions(const Tape& tape, std::span<const Var> actions,
                          int step) {
  for (size_t i = 0; i < actions.size(); ++i) {
    if (!std::isfinite(tape.value(actions[i]))) {
      throw NumericError("inner loop diverged: non-finite action " +
                         std::to_string(i) + " after step " +
                         std::to_string(step + 1));
    }
  }
}

}  // namespace

BilevelResult BilevelGradient(std::span<const double> params,
                              std::span<const double> actions0,
                              const InnerLoopConfig& config,
                              const BilevelFn& inner_cost,
                              const BilevelFn& outer_loss) {
  if (config.steps < 1) {
    throw ArgumentError("BilevelGradient: need at least one inner step");
  }
  Tape tape;
  const std::vector<Var> phi = tape.leaves(params);
  std::vector<Var> actions = tape.leaves(actions0);

  for (int step = 0; step < config.steps; ++step) {
    const Var cost = inner_cost(tape, phi, actions);
    if (!std::isfinite(tape.value(cost))) {
      throw NumericError("inner loop diverged: non-finite cost at step " +
                         std::to_string(step + 1));
    }
    const std::vector<Var> grad = tape.Gradient(cost, actions);
    for (size_t i = 0; i < actions.size(); ++i) {
      actions[i] = tape.axpy_const(actions[i], grad[i], -config.alpha);
    }
    RequireFiniteActions(tape, actions, step);
    if (step == 0) {
      // one unrolled step sizes the rest
      tape.reserve(static_cast<size_t>(tape.size()) *
                   static_cast<size_t>(config.steps + 1));
    }
  }

  const Var loss = outer_loss(tape, phi, actions);
  if (!std::isfinite(tape.value(loss))) {
    throw NumericError("outer loss is non-finite after inner loop");
  }

  BilevelResult result;
  result.param_gradient = tape.GradientValues(loss, phi);
  for (double g : result.param_gradient) {
    if (!std::isfinite(g)) {
      throw NumericError("non-finite outer gradient entry");
    }
  }
  result.final_actions.reserve(actions.size());
  for (Var u : actions) result.final_actions.push_back(tape.value(u));
  result.outer_loss = tape.value(loss);
  return result;
}

std::vector<double> OptimizeActions(std::span<const double> params,
                                    std::span<const double> actions0,
                                    const InnerLoopConfig& config,
                                    const BilevelFn& inner_cost) {
  std::vector<double> actions(actions0.begin(), actions0.end());
  size_t tape_hint = 0;
  for (int step = 0; step < config.steps; ++step) {
    Tape tape;
    tape.reserve(tape_hint);
    const std::vector<Var> phi = tape.leaves(params);
    const std::vector<Var> u = tape.leaves(actions);
    const Var cost = inner_cost(tape, phi, u);
    if (!std::isfinite(tape.value(cost))) {
      throw NumericError("inner loop diverged: non-finite cost at step " +
                         std::to_string(step + 1));
    }
    const std::vector<double> grad = tape.GradientValues(cost, u);
    tape_hint = static_cast<size_t>(tape.size());
    for (size_t i = 0; i < actions.size(); ++i) {
      actions[i] -= config.alpha * grad[i];
      if (!std::isfinite(actions[i])) {
        throw NumericError("inner loop diverged: non-finite action " +
                           std::to_string(i) + " after step " +
                           std::to_string(step + 1));
      }
    }
  }
  return actions;
}

double BilevelObjective(std::span<const double> params,
                        std::span<const double> actions0,
                        const InnerLoopConfig& config,
                        const BilevelFn& inner_cost,
                        const BilevelFn& outer_loss) {
  const std::vector<double> final_actions =
      config.steps > 0 ? OptimizeActions(params, actions0, config, inner_cost)
                       : std::vector<double>(actions0.begin(), actions0.end());
  Tape tape;
  const std::vector<Var> phi = tape.leaves(params);
  const std::vector<Var> u = tape.leaves(final_actions);
  return tape.value(outer_loss(tape, phi, u));
}

}  // namespace tivc
