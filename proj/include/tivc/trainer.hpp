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

#ifndef TIVC_TRAINER_HPP_
#define TIVC_TRAINER_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tivc/costs.hpp"
#include "tivc/env.hpp"

namespace tivc {

struct TrainConfig {
  CostKind kind = CostKind::kLambdaRbf;
  double outer_rate = 0.001;  // eta, cost-parameter step
  double inner_rate = 0.01;   // alpha, action step
  int inner_steps = 5;
  int epochs = 100;
  int base_steps = 15;  // |tau_base| at the control frequency
  double dt = 0.2;
  uint64_t seed = 0;
  int rbf_centers = 10;

  double base_duration_s() const { return base_steps * dt; }
};

struct TrainRecord {
  int epoch = 0;
  int demo_index = 0;
  double irl_loss = 0.0;     // cm^2, outer loss at the post-inner-loop rollout
  double speed_error = 0.0;  // (cm/s)^2 against the demo's achieved speed
  double seconds = 0.0;      // wall clock for this update
};

struct TrainHistory {
  std::vector<TrainRecord> records;  // epochs x demo count entries
};

// mean over timesteps of the squared position distance, cm^2
double IrlLoss(const Trajectory& rollout, const Trajectory& demo);

// N descent steps on the actions from zero against the cost, each step
// re-rolling the trajectory from s0; returns the resulting action sequence
std::vector<Vec3> InnerOptimize(const CostParams& params,
                                const Demonstration& demo, LambdaScalar lam,
                                const State& s0, const TrainConfig& config);

// one outer update: phi <- phi - eta * d IrlLoss / d phi, the gradient taken
// through the unrolled inner loop
CostParams OuterUpdate(const CostParams& params, const Demonstration& demo,
                       const State& s0, const TrainConfig& config);

// Full training pass: per epoch, a seed-shuffled sweep over the demos, one
// outer update each. `history`, when given, is filled incrementally and is
// left valid up to the failing update if training throws.
CostParams Train(const TrainConfig& config, CostParams params,
                 std::span<const Demonstration> demos, const State& s0,
                 TrainHistory* history);

// convenience form: initializes parameters from the config
std::pair<CostParams, TrainHistory> Train(
    const TrainConfig& config, std::span<const Demonstration> demos);

// default initial state shared by both task families
inline State StartState() { return State{Vec3{0.0, 0.0, 10.0}, Vec3{}}; }

}  // namespace tivc

#endif  // TIVC_TRAINER_HPP_
