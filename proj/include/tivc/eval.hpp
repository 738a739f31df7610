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

#ifndef TIVC_EVAL_HPP_
#define TIVC_EVAL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "tivc/costs.hpp"
#include "tivc/env.hpp"
#include "tivc/trainer.hpp"

namespace tivc {

// one (checkpoint seed, task) evaluation
struct EvalTaskResult {
  int task_id = 0;
  double bin_cm = 0.0;       // goal-bin radius the task was sampled from
  double duration_s = 0.0;   // target episode length
  double achieved_speed = 0.0;  // cm/s
  double target_speed = 0.0;    // cm/s, expert demo speed for the same task
  double final_distance = 0.0;  // cm
  bool inserted = false;            // peg-in-hole
  bool strategy_violation = false;  // placement
  uint64_t seed = 0;  // training seed of the checkpoint used
};

struct CellStat {
  double mean = 0.0;
  double stddev = 0.0;  // across seeds
};

// table-shaped aggregates plus the raw rows they were reduced from
struct EvalReport {
  TaskKind env = TaskKind::kPlacement;
  CostKind kind = CostKind::kLambdaRbf;
  std::vector<double> bins_cm;
  std::vector<double> durations_s;
  std::vector<EvalTaskResult> results;

  // headline: placement mean final distance (cm), peg insertion rate (%)
  std::vector<CellStat> headline_per_bin;  // aligned with bins_cm
  CellStat headline_overall;
  // speed mse, (cm/s)^2, [bin][duration] and pooled
  std::vector<std::vector<CellStat>> speed_mse_cells;
  CellStat speed_mse_overall;
};

// meta-test task grid: goals per bin radius crossed with target durations
struct MetaTestGrid {
  std::vector<double> bins_cm = {1.0, 3.0, 5.0};
  int goals_per_bin = 10;
  std::vector<double> durations_s = {2.0, 3.0, 4.0, 5.0, 6.0};
  Vec3 center{0.0, 10.0, 0.0};
  uint64_t task_seed = 9000;
};

struct PolicyOptions {
  int inner_steps = 5;
  double alpha = 0.01;
  bool expert_oracle = false;  // substitute the scripted expert for the policy
};

// zero-initialized actions optimized for `inner_steps` against the cost at
// the task's horizon (lambda = base steps / horizon), then rolled out
Trajectory ExtractPolicy(const CostParams& params, const Task& task,
                         int inner_steps, double alpha);

// total path length over total duration, cm/s
double AchievedSpeed(const Trajectory& traj);

// mean squared achieved-vs-target speed error over a result set, (cm/s)^2
double SpeedMse(std::span<const EvalTaskResult> results);

// expand a grid into concrete tasks (bins outer, goals, durations inner)
std::vector<Task> GridTasks(TaskKind env, const MetaTestGrid& grid);

// Evaluate one checkpoint per training seed over the full grid and reduce
// into table-shaped aggregates (means over tasks per seed, mean/std across
// seeds). All checkpoints must share the cost kind and base duration.
EvalReport RunMetaTest(std::span<const CostParams> checkpoints, TaskKind env,
                       const MetaTestGrid& grid, const PolicyOptions& options);

// inner-step / demo-count sensitivity sweep at fixed speed
struct AblationCurve {
  CostKind kind = CostKind::kLambdaMlp;
  int inner_steps = 5;
  int demo_count = 3;
  uint64_t seed = 0;
  std::vector<double> epoch_loss;  // mean training loss per epoch
};

struct AblationConfig {
  TaskKind env = TaskKind::kPlacement;
  std::vector<int> inner_steps = {1, 3, 5, 10};
  std::vector<int> demo_counts = {3, 6, 12};
  std::vector<CostKind> kinds = {CostKind::kLambdaRbf, CostKind::kLambdaMlp};
  int epochs = 60;
  uint64_t train_seed = 0;
  uint64_t goal_seed = 77;
  double demo_duration_s = 3.0;  // fixed speed
  double goal_radius_cm = 1.0;
  int distinct_goals = 3;
  TrainConfig base;  // rates, base steps; kind/epochs/inner_steps overridden
  // per-family rate overrides (< 0 = use base); the rbf and mlp families
  // sit in different stability regimes, so one shared rate cannot cover a
  // sweep over inner steps
  double rbf_outer_rate = -1.0;
  double rbf_inner_rate = -1.0;
  double mlp_outer_rate = -1.0;
  double mlp_inner_rate = -1.0;
};

// demos for one ablation cell: `count` demos cycling over the sampled goals
std::vector<Demonstration> AblationDemos(const AblationConfig& config,
                                         int count);

std::vector<AblationCurve> AblationGrid(const AblationConfig& config);

}  // namespace tivc

#endif  // TIVC_EVAL_HPP_
