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

#include "tivc/eval.hpp"

#include <algorithm>
#include <cmath>

#include "tivc/diffcore.hpp"

namespace tivc {

Trajectory ExtractPolicy(const CostParams& params, const Task& task,
                         int inner_steps, double alpha) {
  const int horizon = task.horizon();
  const int base_steps =
      static_cast<int>(std::llround(params.base_duration_s * task.frequency_hz));
  const LambdaScalar lam = TemporalScalar(base_steps, horizon);
  const State s0{task.start, Vec3{}};
  const double dt = task.dt();

  const BilevelFn cost = [&params, &s0, dt, lam, &task](
                             Tape& tape, std::span<const Var> phi,
                             std::span<const Var> actions) {
    const std::vector<Var> positions =
        RolloutPositions(tape, s0.position, actions, dt);
    return BuildCost(tape, params, phi, positions, dt, lam, task.goal);
  };

  const std::vector<double> zero(static_cast<size_t>(horizon) * 3, 0.0);
  const std::vector<double> flat =
      OptimizeActions(params.flat, zero, InnerLoopConfig{inner_steps, alpha},
                      cost);
  std::vector<Vec3> actions(static_cast<size_t>(horizon));
  for (size_t t = 0; t < actions.size(); ++t) {
    actions[t] = Vec3{flat[3 * t], flat[3 * t + 1], flat[3 * t + 2]};
  }
  return Rollout(s0, actions, dt);
}

double AchievedSpeed(const Trajectory& traj) {
  if (traj.states.size() < 2) {
    throw ArgumentError("AchievedSpeed: trajectory too short");
  }
  return PathLength(traj) / traj.duration();
}

double SpeedMse(std::span<const EvalTaskResult> results) {
  if (results.empty()) {
    throw ArgumentError("SpeedMse: empty result set");
  }
  double sum = 0.0;
  for (const EvalTaskResult& r : results) {
    const double d = r.achieved_speed - r.target_speed;
    sum += d * d;
  }
  return sum / static_cast<double>(results.size());
}

std::vector<Task> GridTasks(TaskKind env, const MetaTestGrid& grid) {
  std::vector<Task> tasks;
  for (size_t b = 0; b < grid.bins_cm.size(); ++b) {
    // one deterministic goal set per bin
    std::vector<Task> bin_tasks =
        SampleTasks(env, grid.center, grid.bins_cm[b], grid.goals_per_bin,
                    grid.durations_s, grid.task_seed + b);
    tasks.insert(tasks.end(), bin_tasks.begin(), bin_tasks.end());
  }
  return tasks;
}

namespace {

CellStat MeanStd(std::span<const double> values) {
  CellStat stat;
  if (values.empty()) return stat;
  double sum = 0.0;
  for (double v : values) sum += v;
  stat.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - stat.mean) * (v - stat.mean);
  stat.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return stat;
}

double HeadlineValue(TaskKind env, std::span<const EvalTaskResult> rows) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const EvalTaskResult& r : rows) {
    sum += env == TaskKind::kPlacement ? r.final_distance
                                       : (r.inserted ? 100.0 : 0.0);
  }
  return sum / static_cast<double>(rows.size());
}

}  // namespace

EvalReport RunMetaTest(std::span<const CostParams> checkpoints, TaskKind env,
                       const MetaTestGrid& grid,
                       const PolicyOptions& options) {
  if (checkpoints.empty()) {
    throw ArgumentError("RunMetaTest: no checkpoints");
  }
  for (const CostParams& c : checkpoints) {
    if (c.kind != checkpoints.front().kind ||
        c.base_duration_s != checkpoints.front().base_duration_s) {
      throw ArgumentError(
          "RunMetaTest: checkpoints must share cost kind and base duration");
    }
  }

  EvalReport report;
  report.env = env;
  report.kind = checkpoints.front().kind;
  report.bins_cm = grid.bins_cm;
  report.durations_s = grid.durations_s;

  const std::vector<Task> tasks = GridTasks(env, grid);
  const size_t per_bin =
      static_cast<size_t>(grid.goals_per_bin) * grid.durations_s.size();

  // target speeds come from the scripted expert on the same tasks
  std::vector<Trajectory> expert(tasks.size());
  std::vector<double> target_speed(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    expert[i] = ExpertDemo(tasks[i], 0.0, 0).trajectory;
    target_speed[i] = AchievedSpeed(expert[i]);
  }

  for (const CostParams& checkpoint : checkpoints) {
    for (size_t i = 0; i < tasks.size(); ++i) {
      const Task& task = tasks[i];
      const Trajectory traj =
          options.expert_oracle
              ? expert[i]
              : ExtractPolicy(checkpoint, task, options.inner_steps,
                              options.alpha);
      const Outcome outcome = env == TaskKind::kPlacement
                                  ? PlacementOutcome(traj, task)
                                  : InsertionSuccess(traj, task);
      EvalTaskResult row;
      row.task_id = static_cast<int>(i);
      row.bin_cm = grid.bins_cm[i / per_bin];
      row.duration_s = task.duration_s;
      row.achieved_speed = AchievedSpeed(traj);
      row.target_speed = target_speed[i];
      row.final_distance = outcome.final_distance;
      row.inserted = outcome.inserted;
      row.strategy_violation = outcome.strategy_violation;
      row.seed = checkpoint.seed;
      report.results.push_back(row);
    }
  }

  // reduce: per-seed task means, then mean/std across seeds
  const size_t n_tasks = tasks.size();
  const size_t n_seeds = checkpoints.size();
  auto rows_for_seed = [&](size_t s) {
    return std::span<const EvalTaskResult>(report.results)
        .subspan(s * n_tasks, n_tasks);
  };

  report.headline_per_bin.resize(grid.bins_cm.size());
  for (size_t b = 0; b < grid.bins_cm.size(); ++b) {
    std::vector<double> per_seed;
    for (size_t s = 0; s < n_seeds; ++s) {
      per_seed.push_back(
          HeadlineValue(env, rows_for_seed(s).subspan(b * per_bin, per_bin)));
    }
    report.headline_per_bin[b] = MeanStd(per_seed);
  }
  {
    std::vector<double> per_seed;
    for (size_t s = 0; s < n_seeds; ++s) {
      per_seed.push_back(HeadlineValue(env, rows_for_seed(s)));
    }
    report.headline_overall = MeanStd(per_seed);
  }

  report.speed_mse_cells.assign(
      grid.bins_cm.size(),
      std::vector<CellStat>(grid.durations_s.size()));
  for (size_t b = 0; b < grid.bins_cm.size(); ++b) {
    for (size_t d = 0; d < grid.durations_s.size(); ++d) {
      std::vector<double> per_seed;
      for (size_t s = 0; s < n_seeds; ++s) {
        std::vector<EvalTaskResult> cell;
        for (const EvalTaskResult& r : rows_for_seed(s)) {
          if (r.bin_cm == grid.bins_cm[b] &&
              r.duration_s == grid.durations_s[d]) {
            cell.push_back(r);
          }
        }
        per_seed.push_back(SpeedMse(cell));
      }
      report.speed_mse_cells[b][d] = MeanStd(per_seed);
    }
  }
  {
    std::vector<double> per_seed;
    for (size_t s = 0; s < n_seeds; ++s) {
      per_seed.push_back(SpeedMse(rows_for_seed(s)));
    }
    report.speed_mse_overall = MeanStd(per_seed);
  }
  return report;
}

std::vector<Demonstration> AblationDemos(const AblationConfig& config,
                                         int count) {
  const std::vector<double> durations{config.demo_duration_s};
  const std::vector<Task> goal_tasks =
      SampleTasks(config.env, Vec3{0.0, 10.0, 0.0}, config.goal_radius_cm,
                  config.distinct_goals, durations, config.goal_seed);
  std::vector<Demonstration> demos;
  demos.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const Task& task =
        goal_tasks[static_cast<size_t>(i % config.distinct_goals)];
    demos.push_back(ExpertDemo(task, 0.0, static_cast<uint64_t>(i)));
  }
  return demos;
}

std::vector<AblationCurve> AblationGrid(const AblationConfig& config) {
  std::vector<AblationCurve> curves;
  for (CostKind kind : config.kinds) {
    const bool mlp_family =
        kind == CostKind::kMlp || kind == CostKind::kLambdaMlp;
    const double outer =
        mlp_family ? config.mlp_outer_rate : config.rbf_outer_rate;
    const double inner =
        mlp_family ? config.mlp_inner_rate : config.rbf_inner_rate;
    for (int steps : config.inner_steps) {
      for (int count : config.demo_counts) {
        TrainConfig train = config.base;
        train.kind = kind;
        train.inner_steps = steps;
        train.epochs = config.epochs;
        train.seed = config.train_seed;
        if (outer > 0.0) train.outer_rate = outer;
        if (inner > 0.0) train.inner_rate = inner;

        const std::vector<Demonstration> demos = AblationDemos(config, count);
        CostParams params =
            InitParams(kind, train.base_duration_s(), train.seed,
                       train.rbf_centers);
        TrainHistory history;
        Train(train, std::move(params), demos, StartState(), &history);

        AblationCurve curve;
        curve.kind = kind;
        curve.inner_steps = steps;
        curve.demo_count = count;
        curve.seed = config.train_seed;
        curve.epoch_loss.assign(static_cast<size_t>(config.epochs), 0.0);
        for (const TrainRecord& rec : history.records) {
          curve.epoch_loss[static_cast<size_t>(rec.epoch)] +=
              rec.irl_loss / static_cast<double>(count);
        }
        curves.push_back(std::move(curve));
      }
    }
  }
  return curves;
}

}  // namespace tivc
