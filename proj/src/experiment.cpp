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

#include "tivc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tivc/io.hpp"

namespace tivc {

using nlohmann::json;

namespace {
constexpr const char* kToolVersion = "tivc 0.1.0";
}

std::string EnvName(TaskKind kind) {
  return kind == TaskKind::kPlacement ? "placement" : "peg";
}

TaskKind EnvFromName(const std::string& name) {
  if (name == "placement") return TaskKind::kPlacement;
  if (name == "peg") return TaskKind::kPegInHole;
  throw ArgumentError("unknown environment: " + name);
}

TrainConfig ExperimentConfig::MakeTrainConfig(CostKind kind,
                                              uint64_t seed) const {
  TrainConfig train;
  train.kind = kind;
  train.outer_rate = outer_rate;
  train.inner_rate = inner_rate;
  train.inner_steps = inner_steps;
  train.epochs = epochs;
  train.base_steps = base_steps;
  train.dt = dt();
  train.seed = seed;
  train.rbf_centers = rbf_centers;
  return train;
}

std::string ExperimentConfig::DemoPath() const {
  return out_dir + "/demos_" + EnvName(env) + "_" + context + ".jsonl";
}

std::string ExperimentConfig::CheckpointPath(CostKind kind,
                                             uint64_t seed) const {
  return out_dir + "/checkpoint_" + EnvName(env) + "_" + context + "_" +
         CostKindName(kind) + "_seed" + std::to_string(seed) + ".json";
}

std::string ExperimentConfig::HistoryPath(CostKind kind, uint64_t seed) const {
  return out_dir + "/history_" + EnvName(env) + "_" + context + "_" +
         CostKindName(kind) + "_seed" + std::to_string(seed) + ".csv";
}

namespace {

std::vector<double> ToDoubles(const json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");

  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "env") {
        c.env = EnvFromName(value.get<std::string>());
      } else if (key == "context") {
        const std::string s = value.get<std::string>();
        if (s != "a" && s != "b" && s != "c") {
          throw ArgumentError("context must be one of a, b, c");
        }
        c.context = s[0];
      } else if (key == "kinds") {
        c.kinds.clear();
        for (const auto& name : value) {
          c.kinds.push_back(CostKindFromName(name.get<std::string>()));
        }
      } else if (key == "seeds") {
        c.seeds = value.get<std::vector<uint64_t>>();
        if (c.seeds.empty()) throw ArgumentError("seeds must be nonempty");
      } else if (key == "outer_rate") {
        c.outer_rate = value.get<double>();
      } else if (key == "inner_rate") {
        c.inner_rate = value.get<double>();
      } else if (key == "inner_steps") {
        c.inner_steps = value.get<int>();
      } else if (key == "epochs") {
        c.epochs = value.get<int>();
      } else if (key == "base_steps") {
        c.base_steps = value.get<int>();
      } else if (key == "frequency_hz") {
        c.frequency_hz = value.get<double>();
      } else if (key == "rbf_centers") {
        c.rbf_centers = value.get<int>();
      } else if (key == "demo_count") {
        c.demo_count = value.get<int>();
      } else if (key == "goal_center") {
        const std::vector<double> v = ToDoubles(value);
        if (v.size() != 3) throw ArgumentError("goal_center needs 3 entries");
        c.goal_center = Vec3{v[0], v[1], v[2]};
      } else if (key == "goal_radius_cm") {
        c.goal_radius_cm = value.get<double>();
      } else if (key == "fast_duration_s") {
        c.fast_duration_s = value.get<double>();
      } else if (key == "slow_duration_s") {
        c.slow_duration_s = value.get<double>();
      } else if (key == "duration_jitter_s") {
        c.duration_jitter_s = value.get<double>();
      } else if (key == "demo_seed") {
        c.demo_seed = value.get<uint64_t>();
      } else if (key == "bins_cm") {
        c.bins_cm = ToDoubles(value);
      } else if (key == "goals_per_bin") {
        c.goals_per_bin = value.get<int>();
      } else if (key == "test_durations_s") {
        c.test_durations_s = ToDoubles(value);
      } else if (key == "task_seed") {
        c.task_seed = value.get<uint64_t>();
      } else if (key == "test_updates") {
        c.test_updates = value.get<int>();
      } else if (key == "expert_oracle") {
        c.expert_oracle = value.get<bool>();
      } else if (key == "ablation_inner_steps") {
        c.ablation_inner_steps = value.get<std::vector<int>>();
      } else if (key == "ablation_demo_counts") {
        c.ablation_demo_counts = value.get<std::vector<int>>();
      } else if (key == "ablation_epochs") {
        c.ablation_epochs = value.get<int>();
      } else if (key == "out_dir") {
        c.out_dir = value.get<std::string>();
      } else {
        throw ArgumentError("unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("bad config value: ") + e.what());
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  return ParseConfig(ReadTextFile(path));
}

std::string ConfigJson(const ExperimentConfig& c) {
  json j;
  j["env"] = EnvName(c.env);
  j["context"] = std::string(1, c.context);
  {
    json kinds = json::array();
    for (CostKind k : c.kinds) kinds.push_back(CostKindName(k));
    j["kinds"] = kinds;
  }
  j["seeds"] = c.seeds;
  j["outer_rate"] = c.outer_rate;
  j["inner_rate"] = c.inner_rate;
  j["inner_steps"] = c.inner_steps;
  j["epochs"] = c.epochs;
  j["base_steps"] = c.base_steps;
  j["frequency_hz"] = c.frequency_hz;
  j["rbf_centers"] = c.rbf_centers;
  j["demo_count"] = c.demo_count;
  j["goal_center"] = std::vector<double>{c.goal_center.x, c.goal_center.y,
                                         c.goal_center.z};
  j["goal_radius_cm"] = c.goal_radius_cm;
  j["fast_duration_s"] = c.fast_duration_s;
  j["slow_duration_s"] = c.slow_duration_s;
  j["duration_jitter_s"] = c.duration_jitter_s;
  j["demo_seed"] = c.demo_seed;
  j["bins_cm"] = c.bins_cm;
  j["goals_per_bin"] = c.goals_per_bin;
  j["test_durations_s"] = c.test_durations_s;
  j["task_seed"] = c.task_seed;
  j["test_updates"] = c.test_updates;
  j["expert_oracle"] = c.expert_oracle;
  j["ablation_inner_steps"] = c.ablation_inner_steps;
  j["ablation_demo_counts"] = c.ablation_demo_counts;
  j["ablation_epochs"] = c.ablation_epochs;
  j["out_dir"] = c.out_dir;
  return j.dump(2) + "\n";
}

int ThreadBudget() {
  if (const char* env = std::getenv("TIVC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// run fn(0..n-1) on up to ThreadBudget() workers; first exception rethrown
void ParallelUnits(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(ThreadBudget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr error;
  auto body = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string NowUtc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void WriteManifest(const ExperimentConfig& config, const std::string& stage,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs) {
  json manifest;
  manifest["config"] = json::parse(ConfigJson(config));
  json in = json::object();
  for (const std::string& path : inputs) in[path] = FileDigest(path);
  manifest["inputs"] = in;
  json out = json::object();
  for (const std::string& path : outputs) out[path] = FileDigest(path);
  manifest["outputs"] = out;
  manifest["tool_version"] = kToolVersion;
  manifest["created_utc"] = NowUtc();
  WriteTextFile(config.out_dir + "/manifest_" + stage + ".json",
                manifest.dump(2) + "\n");
}

void EnsureOutDir(const ExperimentConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    throw Error("cannot create output directory " + config.out_dir + ": " +
                ec.message());
  }
}

std::vector<Demonstration> GenerateDemos(const ExperimentConfig& config) {
  const bool varied_goals = config.context == 'a' || config.context == 'c';
  const bool misaligned = config.context == 'b' || config.context == 'c';
  Rng rng(config.demo_seed);

  std::vector<Demonstration> demos;
  demos.reserve(static_cast<size_t>(config.demo_count));
  for (int i = 0; i < config.demo_count; ++i) {
    Vec3 goal = config.goal_center;
    if (varied_goals) {
      const double angle = 2.0 * std::numbers::pi * rng.Uniform();
      const double r = config.goal_radius_cm * std::sqrt(rng.Uniform());
      goal = Vec3{config.goal_center.x + r * std::cos(angle),
                  config.goal_center.y + r * std::sin(angle),
                  config.goal_center.z};
    }
    double base = config.fast_duration_s;
    double jitter = 0.0;
    if (misaligned) {
      // first half fast, second half slow
      if (i >= (config.demo_count + 1) / 2) base = config.slow_duration_s;
      jitter = rng.Uniform(-config.duration_jitter_s,
                           config.duration_jitter_s);
    }
    Task task;
    task.kind = config.env;
    task.goal = goal;
    task.duration_s = base;
    task.frequency_hz = config.frequency_hz;
    demos.push_back(
        ExpertDemo(task, jitter, config.demo_seed + static_cast<uint64_t>(i)));
  }
  return demos;
}

CellStat MeanStdOf(const std::vector<double>& values) {
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

json StatJson(const CellStat& stat) {
  json j;
  j["mean"] = stat.mean;
  j["std"] = stat.stddev;
  return j;
}

std::string BinLabel(double bin) {
  std::ostringstream out;
  out << bin << "cm";
  return out.str();
}

}  // namespace

std::vector<std::string> CmdGenDemos(const ExperimentConfig& config) {
  EnsureOutDir(config);
  const std::vector<Demonstration> demos = GenerateDemos(config);
  const std::string path = config.DemoPath();
  WriteDemosJsonl(path, demos);
  WriteManifest(config, "gen_demos", {}, {path});
  return {path};
}

std::vector<std::string> CmdTrain(const ExperimentConfig& config) {
  EnsureOutDir(config);
  const std::vector<Demonstration> demos = ReadDemosJsonl(config.DemoPath());

  struct Unit {
    CostKind kind;
    uint64_t seed;
  };
  std::vector<Unit> units;
  for (CostKind kind : config.kinds) {
    for (uint64_t seed : config.seeds) units.push_back(Unit{kind, seed});
  }

  std::vector<TrainHistory> histories(units.size());
  std::vector<std::string> outputs;
  std::mutex outputs_mu;

  ParallelUnits(static_cast<int>(units.size()), [&](int i) {
    const Unit& unit = units[static_cast<size_t>(i)];
    const TrainConfig train = config.MakeTrainConfig(unit.kind, unit.seed);
    CostParams params = InitParams(unit.kind, train.base_duration_s(),
                                   unit.seed, train.rbf_centers);
    TrainHistory& history = histories[static_cast<size_t>(i)];
    CostParams trained;
    try {
      trained = Train(train, std::move(params), demos, StartState(), &history);
    } catch (...) {
      // keep what we have; the manifest will be absent
      WriteHistoryCsv(config.HistoryPath(unit.kind, unit.seed), history);
      throw;
    }
    const std::string checkpoint_path =
        config.CheckpointPath(unit.kind, unit.seed);
    const std::string history_path = config.HistoryPath(unit.kind, unit.seed);
    WriteCheckpoint(checkpoint_path, trained);
    WriteHistoryCsv(history_path, history);
    const std::lock_guard<std::mutex> lock(outputs_mu);
    outputs.push_back(checkpoint_path);
    outputs.push_back(history_path);
  });

  // convergence curves: mean loss per epoch per unit
  {
    std::ostringstream out;
    out << "epoch,kind,seed,loss\n";
    for (size_t i = 0; i < units.size(); ++i) {
      std::vector<double> per_epoch(static_cast<size_t>(config.epochs), 0.0);
      for (const TrainRecord& r : histories[i].records) {
        per_epoch[static_cast<size_t>(r.epoch)] +=
            r.irl_loss / static_cast<double>(demos.size());
      }
      for (int e = 0; e < config.epochs; ++e) {
        out << e << ',' << CostKindName(units[i].kind) << ',' << units[i].seed
            << ',' << FormatDouble(per_epoch[static_cast<size_t>(e)]) << '\n';
      }
    }
    const std::string fig3 = config.out_dir + "/fig3.csv";
    WriteTextFile(fig3, out.str());
    outputs.push_back(fig3);
  }

  std::sort(outputs.begin(), outputs.end());
  WriteManifest(config, "train", {config.DemoPath()}, outputs);
  return outputs;
}

std::vector<std::string> CmdEval(const ExperimentConfig& config) {
  EnsureOutDir(config);
  const std::vector<Demonstration> demos = ReadDemosJsonl(config.DemoPath());

  MetaTestGrid grid;
  grid.bins_cm = config.bins_cm;
  grid.goals_per_bin = config.goals_per_bin;
  grid.durations_s = config.test_durations_s;
  grid.center = config.goal_center;
  grid.task_seed = config.task_seed;

  PolicyOptions options;
  options.inner_steps = config.test_updates;
  options.alpha = config.inner_rate;
  options.expert_oracle = config.expert_oracle;

  std::vector<std::string> inputs = {config.DemoPath()};
  std::vector<EvalReport> reports;
  std::vector<std::vector<CostParams>> checkpoint_sets;
  for (CostKind kind : config.kinds) {
    std::vector<CostParams> checkpoints;
    for (uint64_t seed : config.seeds) {
      const std::string path = config.CheckpointPath(kind, seed);
      if (!std::filesystem::exists(path)) {
        throw MissingInputError("missing checkpoint for cost " +
                                CostKindName(kind) + ", seed " +
                                std::to_string(seed) + ": " + path);
      }
      checkpoints.push_back(ReadCheckpoint(path));
      inputs.push_back(path);
    }
    reports.push_back(RunMetaTest(checkpoints, config.env, grid, options));
    checkpoint_sets.push_back(std::move(checkpoints));
  }

  std::vector<std::string> outputs;
  const std::string metric = config.env == TaskKind::kPlacement
                                 ? "final_distance_cm"
                                 : "insertion_rate_percent";

  // raw per-task rows
  {
    std::ostringstream out;
    out << "env,kind,seed,task_id,bin_cm,duration_s,target_speed,"
           "achieved_speed,final_distance,inserted,strategy_violation\n";
    for (const EvalReport& report : reports) {
      for (const EvalTaskResult& r : report.results) {
        out << EnvName(config.env) << ',' << CostKindName(report.kind) << ','
            << r.seed << ',' << r.task_id << ',' << FormatDouble(r.bin_cm)
            << ',' << FormatDouble(r.duration_s) << ','
            << FormatDouble(r.target_speed) << ','
            << FormatDouble(r.achieved_speed) << ','
            << FormatDouble(r.final_distance) << ',' << (r.inserted ? 1 : 0)
            << ',' << (r.strategy_violation ? 1 : 0) << '\n';
      }
    }
    const std::string path = config.out_dir + "/raw_results.csv";
    WriteTextFile(path, out.str());
    outputs.push_back(path);
  }

  // table 1: overall headline per kind
  {
    json table;
    table["env"] = EnvName(config.env);
    table["metric"] = metric;
    table["speed_mse_units"] = "(cm/s)^2";
    json kinds = json::object();
    for (const EvalReport& report : reports) {
      json entry;
      entry["headline"] = StatJson(report.headline_overall);
      entry["speed_mse"] = StatJson(report.speed_mse_overall);
      kinds[CostKindName(report.kind)] = entry;
    }
    table["kinds"] = kinds;
    const std::string path = config.out_dir + "/table1.json";
    WriteTextFile(path, table.dump(2) + "\n");
    outputs.push_back(path);
  }

  // table 2: headline per goal bin per kind, plus the average row
  {
    json table;
    table["env"] = EnvName(config.env);
    table["metric"] = metric;
    json rows = json::object();
    for (size_t b = 0; b < config.bins_cm.size(); ++b) {
      json row = json::object();
      for (const EvalReport& report : reports) {
        row[CostKindName(report.kind)] = StatJson(report.headline_per_bin[b]);
      }
      rows[BinLabel(config.bins_cm[b])] = row;
    }
    json avg = json::object();
    for (const EvalReport& report : reports) {
      avg[CostKindName(report.kind)] = StatJson(report.headline_overall);
    }
    rows["avg"] = avg;
    table["rows"] = rows;
    const std::string path = config.out_dir + "/table2.json";
    WriteTextFile(path, table.dump(2) + "\n");
    outputs.push_back(path);
  }

  // fig 2: speed mse on the training demos per checkpoint
  {
    std::ostringstream out;
    out << "context,kind,seed,train_speed_mse\n";
    for (size_t k = 0; k < checkpoint_sets.size(); ++k) {
      for (const CostParams& checkpoint : checkpoint_sets[k]) {
        double sum = 0.0;
        for (const Demonstration& demo : demos) {
          Task task;
          task.kind = config.env;
          task.goal = demo.goal;
          task.duration_s = demo.trajectory.duration();
          task.frequency_hz = config.frequency_hz;
          const Trajectory traj = ExtractPolicy(
              checkpoint, task, options.inner_steps, options.alpha);
          const double d =
              AchievedSpeed(traj) - AchievedSpeed(demo.trajectory);
          sum += d * d;
        }
        out << config.context << ',' << CostKindName(config.kinds[k]) << ','
            << checkpoint.seed << ','
            << FormatDouble(sum / static_cast<double>(demos.size())) << '\n';
      }
    }
    const std::string path = config.out_dir + "/fig2.csv";
    WriteTextFile(path, out.str());
    outputs.push_back(path);
  }

  // fig 4: speed mse per goal bin (durations pooled)
  {
    std::ostringstream out;
    out << "kind,bin_cm,speed_mse_mean,speed_mse_std\n";
    for (const EvalReport& report : reports) {
      for (double bin : config.bins_cm) {
        std::vector<double> per_seed;
        for (uint64_t seed : config.seeds) {
          std::vector<EvalTaskResult> rows;
          for (const EvalTaskResult& r : report.results) {
            if (r.bin_cm == bin && r.seed == seed) rows.push_back(r);
          }
          per_seed.push_back(SpeedMse(rows));
        }
        const CellStat stat = MeanStdOf(per_seed);
        out << CostKindName(report.kind) << ',' << FormatDouble(bin) << ','
            << FormatDouble(stat.mean) << ',' << FormatDouble(stat.stddev)
            << '\n';
      }
    }
    const std::string path = config.out_dir + "/fig4.csv";
    WriteTextFile(path, out.str());
    outputs.push_back(path);
  }

  // fig 6: speed mse per (bin, duration)
  {
    std::ostringstream out;
    out << "kind,bin_cm,duration_s,speed_mse_mean,speed_mse_std\n";
    for (const EvalReport& report : reports) {
      for (size_t b = 0; b < config.bins_cm.size(); ++b) {
        for (size_t d = 0; d < config.test_durations_s.size(); ++d) {
          const CellStat& stat = report.speed_mse_cells[b][d];
          out << CostKindName(report.kind) << ','
              << FormatDouble(config.bins_cm[b]) << ','
              << FormatDouble(config.test_durations_s[d]) << ','
              << FormatDouble(stat.mean) << ',' << FormatDouble(stat.stddev)
              << '\n';
        }
      }
    }
    const std::string path = config.out_dir + "/fig6.csv";
    WriteTextFile(path, out.str());
    outputs.push_back(path);
  }

  WriteManifest(config, "eval", inputs, outputs);
  return outputs;
}

std::vector<std::string> CmdAblate(const ExperimentConfig& config) {
  EnsureOutDir(config);

  AblationConfig ablation;
  ablation.env = config.env;
  ablation.inner_steps = config.ablation_inner_steps;
  ablation.demo_counts = config.ablation_demo_counts;
  ablation.epochs = config.ablation_epochs;
  ablation.train_seed = config.seeds.front();
  ablation.demo_duration_s = config.fast_duration_s;
  ablation.goal_radius_cm = config.goal_radius_cm;
  ablation.base = config.MakeTrainConfig(CostKind::kLambdaRbf,
                                         config.seeds.front());

  const std::vector<AblationCurve> curves = AblationGrid(ablation);

  std::ostringstream out;
  out << "epoch,loss,inner_steps,demos,kind,seed\n";
  for (const AblationCurve& curve : curves) {
    for (size_t e = 0; e < curve.epoch_loss.size(); ++e) {
      out << e << ',' << FormatDouble(curve.epoch_loss[e]) << ','
          << curve.inner_steps << ',' << curve.demo_count << ','
          << CostKindName(curve.kind) << ',' << curve.seed << '\n';
    }
  }
  const std::string path = config.out_dir + "/fig5.csv";
  WriteTextFile(path, out.str());
  WriteManifest(config, "ablate", {}, {path});
  return {path};
}

}  // namespace tivc
