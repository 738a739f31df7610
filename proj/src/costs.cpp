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

#include "tivc/costs.hpp"

#include <cmath>

namespace tivc {

std::string CostKindName(CostKind kind) {
  switch (kind) {
    case CostKind::kPoly:
      return "poly";
    case CostKind::kRbf:
      return "rbf";
    case CostKind::kLambdaRbf:
      return "lrbf";
    case CostKind::kMlp:
      return "mlp";
    case CostKind::kLambdaMlp:
      return "lmlp";
  }
  throw ArgumentError("unknown cost kind");
}

CostKind CostKindFromName(const std::string& name) {
  if (name == "poly") return CostKind::kPoly;
  if (name == "rbf") return CostKind::kRbf;
  if (name == "lrbf") return CostKind::kLambdaRbf;
  if (name == "mlp") return CostKind::kMlp;
  if (name == "lmlp") return CostKind::kLambdaMlp;
  throw ArgumentError("unknown cost kind: " + name);
}

LambdaScalar TemporalScalar(int base_steps, int current_steps) {
  if (base_steps <= 0 || current_steps <= 0) {
    throw ArgumentError("TemporalScalar: step counts must be positive");
  }
  return LambdaScalar{static_cast<double>(base_steps) /
                      static_cast<double>(current_steps)};
}

size_t CostParams::param_count() const {
  switch (kind) {
    case CostKind::kPoly:
      return kStateDims * kPolyPowers;
    case CostKind::kRbf:
    case CostKind::kLambdaRbf:
      return static_cast<size_t>(centers) * kStateDims;
    case CostKind::kMlp:
    case CostKind::kLambdaMlp:
      return static_cast<size_t>(kMlpHidden) * mlp_inputs() + kMlpHidden +
             kMlpHidden + 1;
  }
  throw ArgumentError("unknown cost kind");
}

std::vector<double> RbfCenters(int k, double base_duration_s) {
  if (k < 2) {
    throw ArgumentError("RbfCenters: need at least two centers");
  }
  std::vector<double> centers(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    centers[static_cast<size_t>(j)] = j * base_duration_s / (k - 1);
  }
  return centers;
}

CostParams InitParams(CostKind kind, double base_duration_s, uint64_t seed,
                      int k) {
  CostParams params;
  params.kind = kind;
  params.centers = k;
  params.base_duration_s = base_duration_s;
  params.bandwidth =
      2.0 * (k - 1) * (k - 1) / (base_duration_s * base_duration_s);
  params.seed = seed;
  params.flat.assign(params.param_count(), 0.0);

  switch (kind) {
    case CostKind::kPoly:
    case CostKind::kRbf:
    case CostKind::kLambdaRbf:
      for (double& w : params.flat) w = 0.1;
      break;
    case CostKind::kMlp:
    case CostKind::kLambdaMlp: {
      Rng rng(seed);
      const int inputs = params.mlp_inputs();
      size_t i = 0;
      for (int h = 0; h < kMlpHidden * inputs; ++h) {
        params.flat[i++] = rng.Uniform(-0.5, 0.5);
      }
      i += kMlpHidden;  // hidden biases stay zero
      for (int h = 0; h < kMlpHidden; ++h) {
        params.flat[i++] = rng.Uniform(-0.5, 0.5);
      }
      // output bias stays zero
      break;
    }
  }
  return params;
}

namespace {

Var BuildPolyCost(Tape& tape, std::span<const Var> params,
                  std::span<const Var> positions, const Vec3& goal) {
  const size_t n_states = positions.size() / 3;
  Var sum = tape.constant(0.0);
  for (size_t t = 0; t < n_states; ++t) {
    for (int dim = 0; dim < kStateDims; ++dim) {
      const Var z = positions[3 * t + static_cast<size_t>(dim)];
      const double g = goal[dim];
      // powers 1..3; the zeroth power cancels (1 - 1 = 0)
      Var z_pow = z;
      double g_pow = g;
      for (int power = 1; power < kPolyPowers; ++power) {
        if (power > 1) {
          z_pow = tape.mul(z_pow, z);
          g_pow *= g;
        }
        const Var weight =
            params[static_cast<size_t>(dim) * kPolyPowers +
                   static_cast<size_t>(power)];
        const Var diff = tape.add_const(z_pow, -g_pow);
        sum = tape.mul_add(sum, weight, tape.square(diff));
      }
    }
  }
  return tape.mul_const(sum, 1.0 / static_cast<double>(n_states));
}

Var BuildRbfCost(Tape& tape, const CostParams& meta,
                 std::span<const Var> params, std::span<const Var> positions,
                 double dt, double lambda, const Vec3& goal) {
  const size_t n_states = positions.size() / 3;
  const std::vector<double> centers =
      RbfCenters(meta.centers, meta.base_duration_s);
  Var sum = tape.constant(0.0);
  for (size_t t = 0; t < n_states; ++t) {
    const double scaled_time = lambda * (static_cast<double>(t) * dt);
    for (int dim = 0; dim < kStateDims; ++dim) {
      // kernels do not depend on actions or weights, fold them in as
      // constants: weight(t, dim) = sum_j w[j][dim] * kernel_j(lambda x_t)
      Var weight = tape.mul_const(
          params[static_cast<size_t>(dim)],
          RbfKernel(meta.bandwidth, scaled_time, centers[0]));
      for (int j = 1; j < meta.centers; ++j) {
        const double kernel = RbfKernel(meta.bandwidth, scaled_time,
                                        centers[static_cast<size_t>(j)]);
        const Var w =
            params[static_cast<size_t>(j) * kStateDims +
                   static_cast<size_t>(dim)];
        weight = tape.axpy_const(weight, w, kernel);
      }
      const Var diff = tape.add_const(
          positions[3 * t + static_cast<size_t>(dim)], -goal[dim]);
      sum = tape.mul_add(sum, weight, tape.square(diff));
    }
  }
  return tape.mul_const(sum, 1.0 / static_cast<double>(n_states));
}

Var BuildMlpCost(Tape& tape, const CostParams& meta,
                 std::span<const Var> params, std::span<const Var> positions,
                 double dt, double lambda, const Vec3& goal) {
  const size_t n_states = positions.size() / 3;
  const int inputs = meta.mlp_inputs();
  const size_t hidden_w = 0;
  const size_t hidden_b = static_cast<size_t>(kMlpHidden) * inputs;
  const size_t out_w = hidden_b + kMlpHidden;
  const size_t out_b = out_w + kMlpHidden;

  Var sum = tape.constant(0.0);
  std::vector<Var> features(3);
  for (size_t t = 0; t < n_states; ++t) {
    for (int dim = 0; dim < kStateDims; ++dim) {
      // squared goal error per dimension, in dm^2; cm^2 magnitudes at desk
      // scale (~200) drive every sigmoid unit into saturation, which stalls
      // both the inner action gradients and the outer weight gradients
      const Var diff = tape.add_const(
          tape.mul_const(positions[3 * t + static_cast<size_t>(dim)],
                         kMlpFeatureScale),
          -goal[dim] * kMlpFeatureScale);
      features[static_cast<size_t>(dim)] = tape.square(diff);
    }
    const double time_feature = lambda * (static_cast<double>(t) * dt);

    Var net = params[out_b];
    for (int h = 0; h < kMlpHidden; ++h) {
      Var pre = params[hidden_b + static_cast<size_t>(h)];
      for (int f = 0; f < 3; ++f) {
        const Var w = params[hidden_w + static_cast<size_t>(h * inputs + f)];
        pre = tape.mul_add(pre, w, features[static_cast<size_t>(f)]);
      }
      if (inputs == 4) {
        const Var w = params[hidden_w + static_cast<size_t>(h * inputs + 3)];
        pre = tape.axpy_const(pre, w, time_feature);
      }
      net = tape.mul_add(net, params[out_w + static_cast<size_t>(h)],
                         tape.sigmoid(pre));
    }
    sum = tape.add(sum, net);
  }
  return tape.mul_const(sum, 1.0 / static_cast<double>(n_states));
}

}  // namespace

Var BuildCost(Tape& tape, const CostParams& meta, std::span<const Var> params,
              std::span<const Var> positions, double dt, LambdaScalar lam,
              const Vec3& goal) {
  if (params.size() != meta.param_count()) {
    throw ArgumentError("BuildCost: parameter count mismatch");
  }
  if (positions.empty() || positions.size() % 3 != 0) {
    throw ArgumentError("BuildCost: positions must be non-empty, 3 per state");
  }
  switch (meta.kind) {
    case CostKind::kPoly:
      return BuildPolyCost(tape, params, positions, goal);
    case CostKind::kRbf:
      return BuildRbfCost(tape, meta, params, positions, dt, 1.0, goal);
    case CostKind::kLambdaRbf:
      return BuildRbfCost(tape, meta, params, positions, dt, lam.value, goal);
    case CostKind::kMlp:
      return BuildMlpCost(tape, meta, params, positions, dt, 1.0, goal);
    case CostKind::kLambdaMlp:
      return BuildMlpCost(tape, meta, params, positions, dt, lam.value, goal);
  }
  throw ArgumentError("unknown cost kind");
}

namespace {

std::vector<Var> TrajectoryPositionConstants(Tape& tape,
                                             const Trajectory& traj) {
  std::vector<Var> positions;
  positions.reserve(traj.states.size() * 3);
  for (const State& s : traj.states) {
    positions.push_back(tape.constant(s.position.x));
    positions.push_back(tape.constant(s.position.y));
    positions.push_back(tape.constant(s.position.z));
  }
  return positions;
}

}  // namespace

double EvalCost(const CostParams& params, LambdaScalar lam,
                const Trajectory& traj, const Vec3& goal) {
  if (traj.states.empty()) {
    throw ArgumentError("EvalCost: empty trajectory");
  }
  Tape tape;
  const std::vector<Var> phi = tape.leaves(params.flat);
  const std::vector<Var> positions = TrajectoryPositionConstants(tape, traj);
  return tape.value(
      BuildCost(tape, params, phi, positions, traj.dt, lam, goal));
}

double EvalPolyCost(const CostParams& params, const Trajectory& traj,
                    const Vec3& goal) {
  return EvalCost(params, LambdaScalar{1.0}, traj, goal);
}

double EvalRbfCost(const CostParams& params, LambdaScalar lam,
                   const Trajectory& traj, const Vec3& goal) {
  return EvalCost(params, lam, traj, goal);
}

double EvalMlpCost(const CostParams& params, LambdaScalar lam,
                   const Trajectory& traj, const Vec3& goal) {
  return EvalCost(params, lam, traj, goal);
}

std::vector<std::vector<double>> KernelActivations(const CostParams& params,
                                                   LambdaScalar lam,
                                                   const Trajectory& traj) {
  if (params.kind != CostKind::kRbf && params.kind != CostKind::kLambdaRbf) {
    throw ArgumentError("KernelActivations: not an rbf-family cost");
  }
  const double lambda = params.kind == CostKind::kLambdaRbf ? lam.value : 1.0;
  const std::vector<double> centers =
      RbfCenters(params.centers, params.base_duration_s);
  std::vector<std::vector<double>> activations(
      static_cast<size_t>(params.centers),
      std::vector<double>(traj.states.size()));
  for (size_t t = 0; t < traj.states.size(); ++t) {
    const double scaled_time = lambda * (static_cast<double>(t) * traj.dt);
    for (int j = 0; j < params.centers; ++j) {
      activations[static_cast<size_t>(j)][t] = RbfKernel(
          params.bandwidth, scaled_time, centers[static_cast<size_t>(j)]);
    }
  }
  return activations;
}

}  // namespace tivc
