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

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "tivc/experiment.hpp"
#include "tivc/io.hpp"

namespace tivc {
namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("tivc_exp_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

// tiny but complete pipeline configuration
ExperimentConfig TinyConfig(const std::string& out_dir) {
  ExperimentConfig config;
  config.out_dir = out_dir;
  config.context = 'b';
  config.kinds = {CostKind::kRbf, CostKind::kLambdaRbf};
  config.seeds = {0, 1};
  config.epochs = 2;
  config.demo_count = 4;
  config.bins_cm = {1.0};
  config.goals_per_bin = 2;
  config.test_durations_s = {3.0};
  config.ablation_inner_steps = {1};
  config.ablation_demo_counts = {3};
  config.ablation_epochs = 2;
  return config;
}

TEST_CASE("config parsing applies overrides and rejects unknown keys") {
  const ExperimentConfig config = ParseConfig(
      R"({"env":"peg","context":"a","kinds":["mlp","lmlp"],"epochs":7,)"
      R"("seeds":[5],"goal_center":[1,2,3]})");
  CHECK(config.env == TaskKind::kPegInHole);
  CHECK(config.context == 'a');
  REQUIRE(config.kinds.size() == 2);
  CHECK(config.kinds[0] == CostKind::kMlp);
  CHECK(config.epochs == 7);
  CHECK(config.seeds == std::vector<uint64_t>{5});
  CHECK(config.goal_center.y == 2.0);

  CHECK_THROWS_AS(ParseConfig(R"({"epoch":3})"), ArgumentError);
  CHECK_THROWS_AS(ParseConfig(R"({"context":"q"})"), ArgumentError);
  CHECK_THROWS_AS(ParseConfig("[1,2]"), ArgumentError);
  CHECK_THROWS_AS(ParseConfig("{"), ArgumentError);
}

TEST_CASE("config serialization round-trips") {
  ExperimentConfig config;
  config.env = TaskKind::kPegInHole;
  config.context = 'c';
  config.epochs = 99;
  config.seeds = {3, 4};
  const ExperimentConfig loaded = ParseConfig(ConfigJson(config));
  CHECK(loaded.env == config.env);
  CHECK(loaded.context == config.context);
  CHECK(loaded.epochs == config.epochs);
  CHECK(loaded.seeds == config.seeds);
}

TEST_CASE("context a generates aligned demos with varied goals") {
  TempDir dir("ctx_a");
  ExperimentConfig config = TinyConfig(dir.path.string());
  config.context = 'a';
  config.demo_count = 5;
  CmdGenDemos(config);
  const std::vector<Demonstration> demos = ReadDemosJsonl(config.DemoPath());
  REQUIRE(demos.size() == 5);
  bool goals_vary = false;
  for (const Demonstration& demo : demos) {
    CHECK(demo.trajectory.steps() == 15);
    CHECK(demo.speed_class == SpeedClass::kAligned);
    CHECK(Distance(demo.goal, config.goal_center) <= config.goal_radius_cm);
    if (Distance(demo.goal, config.goal_center) > 1e-6) goals_vary = true;
  }
  CHECK(goals_vary);
}

TEST_CASE("context b generates a fast/slow split at a fixed goal") {
  TempDir dir("ctx_b");
  ExperimentConfig config = TinyConfig(dir.path.string());
  config.demo_count = 6;
  CmdGenDemos(config);
  const std::vector<Demonstration> demos = ReadDemosJsonl(config.DemoPath());
  REQUIRE(demos.size() == 6);
  int fast = 0, slow = 0;
  for (const Demonstration& demo : demos) {
    CHECK(demo.goal.x == config.goal_center.x);
    CHECK(demo.goal.y == config.goal_center.y);
    if (demo.speed_class == SpeedClass::kFast) ++fast;
    if (demo.speed_class == SpeedClass::kSlow) ++slow;
    const double duration = demo.trajectory.duration();
    const bool near_fast = duration >= 2.6 && duration <= 3.4;
    const bool near_slow = duration >= 4.6 && duration <= 5.4;
    CHECK((near_fast || near_slow));
  }
  CHECK(fast == 3);
  CHECK(slow == 3);
}

TEST_CASE("demo generation is byte-identical across reruns") {
  TempDir dir_a("demo_rerun_a");
  TempDir dir_b("demo_rerun_b");
  ExperimentConfig config = TinyConfig(dir_a.path.string());
  config.context = 'c';
  CmdGenDemos(config);
  config.out_dir = dir_b.path.string();
  CmdGenDemos(config);
  CHECK(ReadTextFile((dir_a.path / "demos_placement_c.jsonl").string()) ==
        ReadTextFile((dir_b.path / "demos_placement_c.jsonl").string()));
}

TEST_CASE("the full pipeline writes its declared artifacts deterministically") {
  TempDir dir_a("pipe_a");
  TempDir dir_b("pipe_b");

  auto run = [](const std::string& out) {
    ExperimentConfig config = TinyConfig(out);
    CmdGenDemos(config);
    CmdTrain(config);
    CmdEval(config);
    CmdAblate(config);
    return config;
  };
  const ExperimentConfig config = run(dir_a.path.string());
  run(dir_b.path.string());

  // one checkpoint and history per kind x seed
  for (CostKind kind : config.kinds) {
    for (uint64_t seed : config.seeds) {
      CHECK(std::filesystem::exists(config.CheckpointPath(kind, seed)));
      CHECK(std::filesystem::exists(config.HistoryPath(kind, seed)));
    }
  }
  for (const char* name :
       {"table1.json", "table2.json", "fig2.csv", "fig3.csv", "fig4.csv",
        "fig5.csv", "fig6.csv", "raw_results.csv", "manifest_train.json",
        "manifest_eval.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir_a.path / name));
  }

  // manifests carry timestamps and histories a wall-clock column; everything
  // else must match byte for byte
  for (const auto& entry : std::filesystem::directory_iterator(dir_a.path)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("manifest_", 0) == 0) continue;
    if (name.rfind("history_", 0) == 0) {
      // compare up to the seconds column
      const std::string a = ReadTextFile(entry.path().string());
      const std::string b = ReadTextFile((dir_b.path / name).string());
      auto strip_seconds = [](const std::string& text) {
        std::string out;
        size_t start = 0;
        while (start < text.size()) {
          size_t end = text.find('\n', start);
          if (end == std::string::npos) end = text.size();
          const std::string line = text.substr(start, end - start);
          out += line.substr(0, line.rfind(','));
          out += '\n';
          start = end + 1;
        }
        return out;
      };
      CAPTURE(name);
      CHECK(strip_seconds(a) == strip_seconds(b));
      continue;
    }
    CAPTURE(name);
    CHECK(ReadTextFile(entry.path().string()) ==
          ReadTextFile((dir_b.path / name).string()));
  }
}

TEST_CASE("evaluation without checkpoints names the gap") {
  TempDir dir("eval_missing");
  ExperimentConfig config = TinyConfig(dir.path.string());
  CmdGenDemos(config);
  CHECK_THROWS_WITH_AS(CmdEval(config), doctest::Contains("rbf"),
                       MissingInputError);
}

TEST_CASE("training without demo files reports missing inputs") {
  TempDir dir("train_missing");
  const ExperimentConfig config = TinyConfig(dir.path.string());
  CHECK_THROWS_AS(CmdTrain(config), MissingInputError);
}

TEST_CASE("ablation emits the declared column layout") {
  TempDir dir("ablate");
  ExperimentConfig config = TinyConfig(dir.path.string());
  CmdAblate(config);
  const std::string content =
      ReadTextFile((dir.path / "fig5.csv").string());
  CHECK(content.rfind("epoch,loss,inner_steps,demos,kind,seed\n", 0) == 0);
  // 2 kinds x 1 inner-step setting x 1 demo count x 2 epochs
  size_t rows = 0;
  for (char c : content) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 1 + 2 * 2);
}

TEST_CASE("thread budget honors the environment override") {
  setenv("TIVC_THREADS", "3", 1);
  CHECK(ThreadBudget() == 3);
  unsetenv("TIVC_THREADS");
  CHECK(ThreadBudget() >= 1);
}

TEST_CASE("parallel training matches the single-threaded artifacts") {
  TempDir dir_a("thr_a");
  TempDir dir_b("thr_b");
  ExperimentConfig config = TinyConfig(dir_a.path.string());
  CmdGenDemos(config);
  setenv("TIVC_THREADS", "1", 1);
  CmdTrain(config);
  ExperimentConfig parallel = config;
  parallel.out_dir = dir_b.path.string();
  CmdGenDemos(parallel);
  setenv("TIVC_THREADS", "2", 1);
  CmdTrain(parallel);
  unsetenv("TIVC_THREADS");
  for (CostKind kind : config.kinds) {
    for (uint64_t seed : config.seeds) {
      CHECK(ReadTextFile(config.CheckpointPath(kind, seed)) ==
            ReadTextFile(parallel.CheckpointPath(kind, seed)));
    }
  }
}

}  // namespace
}  // namespace tivc
