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

#include "tivc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "tivc/diffcore.hpp"
#include "tivc/env.hpp"

namespace tivc {

namespace {

constexpr double kFirstOrderEps = 1e-5;
// Wider step for the bi-level oracle: the composed objective runs through N
// inner loops, and small steps leave the smallest gradient entries inside
// the central-difference roundoff floor.
constexpr double kBilevelEps = 1e-3;

struct Instance {
  CostParams meta;
  std::vector<double> actions;
  Vec3 start;
  Vec3 goal;
  LambdaScalar lam{1.0};
  double dt = 0.2;
  int horizon = 5;
};

// Small randomized instance with entries in [-1, 1]. Geometry and weight
// scales keep every kind in its responsive range: saturated sigmoid units
// and near-dead kernels have gradients below what central differences can
// resolve, which would test the oracle's noise floor instead of the tape.
// magnitude in [lo, hi], random sign
double SignedDraw(Rng& rng, double lo, double hi) {
  const double magnitude = rng.Uniform(lo, hi);
  return rng.Uniform() < 0.5 ? -magnitude : magnitude;
}

Instance RandomInstance(CostKind kind, Rng& rng) {
  Instance inst;
  const bool mlp_kind =
      kind == CostKind::kMlp || kind == CostKind::kLambdaMlp;
  inst.horizon = rng.UniformInt(4, 10);
  if (mlp_kind) {
    // mlp features are squared dm goal errors: desk-scale geometry with the
    // goal displaced from the start keeps the features O(1), away from both
    // sigmoid saturation and the central-difference noise floor
    inst.start = Vec3{rng.Uniform(-6.0, -2.0), rng.Uniform(-6.0, -2.0),
                      rng.Uniform(-6.0, -2.0)};
    inst.goal = Vec3{rng.Uniform(2.0, 6.0), rng.Uniform(2.0, 6.0),
                     rng.Uniform(2.0, 6.0)};
  } else {
    inst.start = Vec3{rng.Uniform(-0.5, 0.5), rng.Uniform(-0.5, 0.5),
                      rng.Uniform(-0.5, 0.5)};
    inst.goal = Vec3{rng.Uniform(-0.5, 0.5), rng.Uniform(-0.5, 0.5),
                     rng.Uniform(-0.5, 0.5)};
  }
  inst.lam = LambdaScalar{rng.Uniform(0.7, 1.4)};

  inst.meta.kind = kind;
  inst.meta.centers = 4;
  inst.meta.base_duration_s = inst.lam.value * inst.horizon * inst.dt;
  inst.meta.bandwidth = 2.0 * 9.0 /
                        (inst.meta.base_duration_s * inst.meta.base_duration_s);
  inst.meta.flat.resize(inst.meta.param_count());
  for (double& w : inst.meta.flat) {
    // bounded away from zero so no gradient entry sits below what the
    // finite-difference oracle can resolve
    w = mlp_kind ? SignedDraw(rng, 0.25, 0.5) : SignedDraw(rng, 0.3, 1.0);
  }

  inst.actions.resize(static_cast<size_t>(inst.horizon) * 3);
  for (double& u : inst.actions) u = rng.Uniform(-1.0, 1.0);
  return inst;
}

// cost as a function of the joint [params; actions] vector
TapeFn JointCostFn(const Instance& inst) {
  const size_t n_params = inst.meta.param_count();
  return [inst, n_params](Tape& tape, std::span<const Var> joint) {
    const std::span<const Var> phi = joint.first(n_params);
    const std::span<const Var> actions = joint.subspan(n_params);
    const std::vector<Var> positions =
        RolloutPositions(tape, inst.start, actions, inst.dt);
    return BuildCost(tape, inst.meta, phi, positions, inst.dt, inst.lam,
                     inst.goal);
  };
}

double FirstOrderCheck(const Instance& inst) {
  std::vector<double> joint = inst.meta.flat;
  joint.insert(joint.end(), inst.actions.begin(), inst.actions.end());
  return CheckGradient(JointCostFn(inst), joint, kFirstOrderEps).max_rel_error;
}

double BilevelCheck(const Instance& inst, Rng& rng) {
  // alpha well above the default so every parameter's influence on the
  // unrolled actions clears the finite-difference resolution
  const InnerLoopConfig inner_cfg{rng.UniformInt(1, 5), 0.1};

  // synthetic demo positions for the outer loss
  std::vector<double> target(static_cast<size_t>(inst.horizon + 1) * 3);
  for (double& p : target) p = rng.Uniform(-1.0, 1.0);

  const BilevelFn inner = [&inst](Tape& tape, std::span<const Var> phi,
                                  std::span<const Var> actions) {
    const std::vector<Var> positions =
        RolloutPositions(tape, inst.start, actions, inst.dt);
    return BuildCost(tape, inst.meta, phi, positions, inst.dt, inst.lam,
                     inst.goal);
  };
  const BilevelFn outer = [&inst, &target](Tape& tape,
                                           std::span<const Var> /*phi*/,
                                           std::span<const Var> actions) {
    const std::vector<Var> positions =
        RolloutPositions(tape, inst.start, actions, inst.dt);
    Var sum = tape.constant(0.0);
    for (size_t i = 0; i < positions.size(); ++i) {
      sum = tape.add(sum,
                     tape.square(tape.add_const(positions[i], -target[i])));
    }
    return tape.mul_const(sum, 3.0 / static_cast<double>(positions.size()));
  };

  const std::vector<double> zero(inst.actions.size(), 0.0);
  const BilevelResult analytic =
      BilevelGradient(inst.meta.flat, zero, inner_cfg, inner, outer);

  std::vector<double> params = inst.meta.flat;
  std::vector<double> numeric(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + kBilevelEps;
    const double hi = BilevelObjective(params, zero, inner_cfg, inner, outer);
    params[i] = saved - kBilevelEps;
    const double lo = BilevelObjective(params, zero, inner_cfg, inner, outer);
    params[i] = saved;
    numeric[i] = (hi - lo) / (2.0 * kBilevelEps);
  }
  return MaxRelError(analytic.param_gradient, numeric);
}

}  // namespace

std::vector<GradCheckSummary> RunGradientBattery(int first_order_instances,
                                                 int bilevel_instances,
                                                 uint64_t seed) {
  const CostKind kinds[] = {CostKind::kPoly, CostKind::kRbf,
                            CostKind::kLambdaRbf, CostKind::kMlp,
                            CostKind::kLambdaMlp};
  std::vector<GradCheckSummary> out;
  for (CostKind kind : kinds) {
    Rng rng(seed ^ (static_cast<uint64_t>(kind) + 1) * 0x9e3779b97f4a7c15ULL);
    GradCheckSummary summary;
    summary.kind = kind;
    summary.first_order_instances = first_order_instances;
    summary.bilevel_instances = bilevel_instances;
    for (int i = 0; i < first_order_instances; ++i) {
      const Instance inst = RandomInstance(kind, rng);
      summary.first_order_worst =
          std::max(summary.first_order_worst, FirstOrderCheck(inst));
    }
    for (int i = 0; i < bilevel_instances; ++i) {
      Instance inst = RandomInstance(kind, rng);
      inst.horizon = std::min(inst.horizon, 8);
      inst.actions.resize(static_cast<size_t>(inst.horizon) * 3);
      summary.bilevel_worst =
          std::max(summary.bilevel_worst, BilevelCheck(inst, rng));
    }
    out.push_back(summary);
  }
  return out;
}

int PrintGradientBattery(std::ostream& os, int first_order_instances,
                         int bilevel_instances, uint64_t seed) {
  const std::vector<GradCheckSummary> summaries =
      RunGradientBattery(first_order_instances, bilevel_instances, seed);
  os << "kind  first-order(max rel, n=" << first_order_instances
     << ")  bilevel(max rel, n=" << bilevel_instances << ")  status\n";
  int failures = 0;
  for (const GradCheckSummary& s : summaries) {
    os << std::left << std::setw(6) << CostKindName(s.kind) << std::scientific
       << std::setprecision(3) << s.first_order_worst << " (tol "
       << GradCheckSummary::kFirstOrderTol << ")  " << s.bilevel_worst
       << " (tol " << GradCheckSummary::kBilevelTol << ")  "
       << (s.pass() ? "ok" : "FAIL") << "\n";
    if (!s.pass()) ++failures;
  }
  return failures;
}

}  // namespace tivc
