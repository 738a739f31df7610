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

#ifndef TIVC_EXPERIMENT_HPP_
#define TIVC_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tivc/eval.hpp"

namespace tivc {

std::string EnvName(TaskKind kind);  // placement, peg
TaskKind EnvFromName(const std::string& name);

// One experiment = one (environment, meta-train context) with a set of cost
// kinds and training seeds. Stages communicate only through the files below
// out_dir; every stage is a pure function of (config, seed).
//
// Contexts: a = aligned durations with varied goals, b = fixed goal with
// misaligned durations, c = both varied.
struct ExperimentConfig {
  TaskKind env = TaskKind::kPlacement;
  char context = 'c';
  std::vector<CostKind> kinds = {CostKind::kRbf, CostKind::kLambdaRbf,
                                 CostKind::kMlp, CostKind::kLambdaMlp};
  std::vector<uint64_t> seeds = {0, 1, 2};

  // training
  double outer_rate = 0.001;
  double inner_rate = 0.01;
  int inner_steps = 5;
  int epochs = 400;
  int base_steps = 15;
  double frequency_hz = 5.0;
  int rbf_centers = 10;

  // demonstrations
  int demo_count = 12;
  Vec3 goal_center{0.0, 10.0, 0.0};
  double goal_radius_cm = 1.0;
  double fast_duration_s = 3.0;
  double slow_duration_s = 5.0;
  double duration_jitter_s = 0.2;
  uint64_t demo_seed = 4242;

  // meta-test
  std::vector<double> bins_cm = {1.0, 3.0, 5.0};
  int goals_per_bin = 10;
  std::vector<double> test_durations_s = {2.0, 3.0, 4.0, 5.0, 6.0};
  uint64_t task_seed = 9000;
  int test_updates = 5;
  bool expert_oracle = false;

  // ablation
  std::vector<int> ablation_inner_steps = {1, 3, 5, 10};
  std::vector<int> ablation_demo_counts = {3, 6, 12};
  int ablation_epochs = 60;

  std::string out_dir = "out";

  double dt() const { return 1.0 / frequency_hz; }
  TrainConfig MakeTrainConfig(CostKind kind, uint64_t seed) const;
  std::string DemoPath() const;
  std::string CheckpointPath(CostKind kind, uint64_t seed) const;
  std::string HistoryPath(CostKind kind, uint64_t seed) const;
};

// config file (JSON object, all keys optional) merged over the defaults;
// unknown keys are rejected
ExperimentConfig LoadConfig(const std::string& path);
ExperimentConfig ParseConfig(const std::string& json_text);
std::string ConfigJson(const ExperimentConfig& config);

// demo files for the configured context; returns the written paths
std::vector<std::string> CmdGenDemos(const ExperimentConfig& config);

// one checkpoint + history per (kind, seed); the manifest is written last,
// so an interrupted run leaves histories but no manifest
std::vector<std::string> CmdTrain(const ExperimentConfig& config);

// table1.json / table2.json / fig2.csv / fig4.csv / fig6.csv / raw_results.csv
std::vector<std::string> CmdEval(const ExperimentConfig& config);

// inner-step x demo-count grid, persisted as fig5.csv
std::vector<std::string> CmdAblate(const ExperimentConfig& config);

// worker count: TIVC_THREADS when set, else hardware concurrency
int ThreadBudget();

}  // namespace tivc

#endif  // TIVC_EXPERIMENT_HPP_
