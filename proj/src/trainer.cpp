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

#include "tivc/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "tivc/diffcore.hpp"

namespace tivc {

double IrlLoss(const Trajectory& rollout, const Trajectory& demo) {
  if (rollout.states.size() != demo.states.size()) {
    throw Error("IrlLoss: trajectory lengths differ");
  }
  double sum = 0.0;
  for (size_t t = 0; t < rollout.states.size(); ++t) {
    const Vec3 d = rollout.states[t].position - demo.states[t].position;
    sum += d.x * d.x + d.y * d.y + d.z * d.z;
  }
  return sum / static_cast<double>(rollout.states.size());
}

namespace {

// IrlLoss against fixed demo positions, recorded on the tape
Var IrlLossExpr(Tape& tape, std::span<const Var> positions,
                const Trajectory& demo) {
  const size_t n_states = positions.size() / 3;
  Var sum = tape.constant(0.0);
  for (size_t t = 0; t < n_states; ++t) {
    const Vec3& target = demo.states[t].position;
    for (int dim = 0; dim < 3; ++dim) {
      const Var diff = tape.add_const(
          positions[3 * t + static_cast<size_t>(dim)], -target[dim]);
      sum = tape.add(sum, tape.square(diff));
    }
  }
  return tape.mul_const(sum, 1.0 / static_cast<double>(n_states));
}

BilevelFn MakeInnerCost(const CostParams& meta, LambdaScalar lam,
                        const State& s0, double dt, const Vec3& goal) {
  return [&meta, lam, s0, dt, goal](Tape& tape, std::span<const Var> phi,
                                    std::span<const Var> actions) {
    const std::vector<Var> positions =
        RolloutPositions(tape, s0.position, actions, dt);
    return BuildCost(tape, meta, phi, positions, dt, lam, goal);
  };
}

std::vector<Vec3> UnflattenActions(std::span<const double> flat) {
  std::vector<Vec3> actions(flat.size() / 3);
  for (size_t t = 0; t < actions.size(); ++t) {
    actions[t] = Vec3{flat[3 * t], flat[3 * t + 1], flat[3 * t + 2]};
  }
  return actions;
}

struct UpdateOutcome {
  CostParams params;
  double irl_loss = 0.0;
  double speed_error = 0.0;
};

// one Algorithm-1 body: fresh zero actions, lambda from the demo length,
// unrolled inner loop, one outer step on phi
UpdateOutcome TrainingUpdate(const CostParams& params,
                             const Demonstration& demo, const State& s0,
                             const TrainConfig& config) {
  const LambdaScalar lam =
      TemporalScalar(config.base_steps, demo.trajectory.steps());
  const BilevelFn inner = MakeInnerCost(params, lam, s0, config.dt, demo.goal);
  const BilevelFn outer = [&demo, &s0, &config](Tape& tape,
                                                std::span<const Var> /*phi*/,
                                                std::span<const Var> actions) {
    const std::vector<Var> positions =
        RolloutPositions(tape, s0.position, actions, config.dt);
    return IrlLossExpr(tape, positions, demo.trajectory);
  };

  const std::vector<double> zero(
      static_cast<size_t>(demo.trajectory.steps()) * 3, 0.0);
  const InnerLoopConfig inner_cfg{config.inner_steps, config.inner_rate};
  const BilevelResult result =
      BilevelGradient(params.flat, zero, inner_cfg, inner, outer);

  UpdateOutcome out{params, result.outer_loss, 0.0};
  for (size_t i = 0; i < out.params.flat.size(); ++i) {
    out.params.flat[i] -= config.outer_rate * result.param_gradient[i];
  }

  const Trajectory rollout =
      Rollout(s0, UnflattenActions(result.final_actions), config.dt);
  const double achieved = PathLength(rollout) / rollout.duration();
  const double target =
      PathLength(demo.trajectory) / demo.trajectory.duration();
  out.speed_error = (achieved - target) * (achieved - target);
  return out;
}

}  // namespace

std::vector<Vec3> InnerOptimize(const CostParams& params,
                                const Demonstration& demo, LambdaScalar lam,
                                const State& s0, const TrainConfig& config) {
  const int horizon = demo.trajectory.steps();
  const std::vector<double> zero(static_cast<size_t>(horizon) * 3, 0.0);
  const BilevelFn cost = MakeInnerCost(params, lam, s0, config.dt, demo.goal);
  const InnerLoopConfig inner{config.inner_steps, config.inner_rate};
  return UnflattenActions(OptimizeActions(params.flat, zero, inner, cost));
}

CostParams OuterUpdate(const CostParams& params, const Demonstration& demo,
                       const State& s0, const TrainConfig& config) {
  return TrainingUpdate(params, demo, s0, config).params;
}

CostParams Train(const TrainConfig& config, CostParams params,
                 std::span<const Demonstration> demos, const State& s0,
                 TrainHistory* history) {
  if (demos.empty()) {
    throw ArgumentError("Train: no demonstrations");
  }
  for (const Demonstration& demo : demos) {
    if (demo.trajectory.dt != config.dt) {
      throw ArgumentError("Train: demo control period differs from config");
    }
  }

  Rng shuffle_rng(config.seed);
  std::vector<int> order(demos.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.Shuffle(order);
    for (int demo_index : order) {
      const auto t0 = std::chrono::steady_clock::now();
      UpdateOutcome outcome;
      try {
        outcome = TrainingUpdate(
            params, demos[static_cast<size_t>(demo_index)], s0, config);
      } catch (const NumericError& e) {
        throw TrainingError(std::string(e.what()) + " (epoch " +
                                std::to_string(epoch) + ", demo " +
                                std::to_string(demo_index) + ")",
                            epoch, demo_index);
      }
      params = std::move(outcome.params);
      params.epoch = epoch + 1;
      if (history != nullptr) {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        history->records.push_back(TrainRecord{epoch, demo_index,
                                               outcome.irl_loss,
                                               outcome.speed_error, seconds});
      }
    }
  }
  return params;
}

std::pair<CostParams, TrainHistory> Train(
    const TrainConfig& config, std::span<const Demonstration> demos) {
  CostParams params = InitParams(config.kind, config.base_duration_s(),
                                 config.seed, config.rbf_centers);
  TrainHistory history;
  CostParams trained =
      Train(config, std::move(params), demos, StartState(), &history);
  return {std::move(trained), std::move(history)};
}

}  // namespace tivc
