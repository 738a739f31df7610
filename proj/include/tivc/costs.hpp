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

#ifndef TIVC_COSTS_HPP_
#define TIVC_COSTS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tivc/common.hpp"
#include "tivc/diffcore.hpp"
#include "tivc/env.hpp"

namespace tivc {

// Cost parameterizations. The lambda variants rescale their time feature by
// the temporal scalar so the learned weights track trajectory phase instead
// of wall-clock time; the plain variants are the fixed-timeline baselines.
enum class CostKind { kPoly, kRbf, kLambdaRbf, kMlp, kLambdaMlp };

std::string CostKindName(CostKind kind);           // poly, rbf, lrbf, mlp, lmlp
CostKind CostKindFromName(const std::string& name);

// temporal scalar: base step count over current step count, > 1 for
// executions faster than the base, < 1 for slower ones
struct LambdaScalar {
  double value = 1.0;
};

LambdaScalar TemporalScalar(int base_steps, int current_steps);

constexpr int kStateDims = 3;
constexpr int kPolyPowers = 4;   // powers 0..3 per state dimension
constexpr int kMlpHidden = 16;
// mlp goal-error features are measured in decimeters (1 dm = 10 cm)
constexpr double kMlpFeatureScale = 0.1;

// One learnable cost: kind tag, the flat parameter vector that the trainer
// updates, and the fixed hyperparameters (kernel layout, bandwidth, network
// shape) needed to evaluate it.
//
// Flat layouts:
//   poly        weights[dim][power], row-major, 3 x 4
//   rbf / lrbf  weights[center][dim], row-major, K x 3
//   mlp / lmlp  hidden weights (16 x inputs, row-major), hidden biases (16),
//               output weights (16), output bias (1)
struct CostParams {
  CostKind kind = CostKind::kLambdaRbf;
  std::vector<double> flat;

  int centers = 10;               // K, rbf kinds
  double base_duration_s = 3.0;   // seconds, rbf kinds
  double bandwidth = 18.0;        // 1/s^2, rbf kinds, fixed (not learned)

  uint64_t seed = 0;  // provenance, carried into checkpoints
  int epoch = 0;

  bool uses_lambda() const {
    return kind == CostKind::kLambdaRbf || kind == CostKind::kLambdaMlp;
  }
  int mlp_inputs() const { return kind == CostKind::kLambdaMlp ? 4 : 3; }
  size_t param_count() const;
};

// linearly spaced kernel centers over [0, base_duration], seconds; K >= 2
std::vector<double> RbfCenters(int k, double base_duration_s);

// Gaussian kernel on the base timeline
inline double RbfKernel(double bandwidth, double scaled_time, double center) {
  const double d = scaled_time - center;
  return std::exp(-bandwidth * d * d);
}

// Fresh parameters: poly/rbf weights 0.1, rbf bandwidth 2(K-1)^2 / D^2 so
// adjacent kernels cross near 0.6, mlp weights uniform [-0.5, 0.5] from the
// seed with zero biases.
CostParams InitParams(CostKind kind, double base_duration_s, uint64_t seed,
                      int k = 10);

// Record the cost of a rollout on the tape. `params` are the flat learnable
// values as tape vars, `positions` the flat rollout positions (3 per state,
// start included). The plain kinds ignore `lam`.
Var BuildCost(Tape& tape, const CostParams& meta, std::span<const Var> params,
              std::span<const Var> positions, double dt, LambdaScalar lam,
              const Vec3& goal);

// cost value for a concrete trajectory (builds a scratch tape)
double EvalCost(const CostParams& params, LambdaScalar lam,
                const Trajectory& traj, const Vec3& goal);

// per-kind evaluation entry points
double EvalPolyCost(const CostParams& params, const Trajectory& traj,
                    const Vec3& goal);
double EvalRbfCost(const CostParams& params, LambdaScalar lam,
                   const Trajectory& traj, const Vec3& goal);
double EvalMlpCost(const CostParams& params, LambdaScalar lam,
                   const Trajectory& traj, const Vec3& goal);

// kernel activations [center][timestep] for an rbf-family cost
std::vector<std::vector<double>> KernelActivations(const CostParams& params,
                                                   LambdaScalar lam,
                                                   const Trajectory& traj);

}  // namespace tivc

#endif  // TIVC_COSTS_HPP_
