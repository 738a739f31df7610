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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tivc/experiment.hpp"
#include "tivc/gradcheck.hpp"

namespace {

// exit codes: 0 ok, 2 config error, 3 numeric failure, 4 missing inputs
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitMissing = 4;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::vector<uint64_t> seeds;
  std::vector<std::string> kinds;
  std::string context;
  std::string env;
  int inner_steps = -1;
  int test_updates = -1;
  int epochs = -1;
  bool expert_oracle = false;
};

void AddCommonOptions(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--config", o->config_path, "experiment config JSON");
  cmd->add_option("--out", o->out_dir, "output directory");
  cmd->add_option("--seeds", o->seeds, "training seeds")->delimiter(',');
  cmd->add_option("--cost", o->kinds, "cost kinds (poly,rbf,lrbf,mlp,lmlp)")
      ->delimiter(',');
  cmd->add_option("--context", o->context, "meta-train context (a, b, c)");
  cmd->add_option("--env", o->env, "environment (placement, peg)");
  cmd->add_option("--inner-steps", o->inner_steps, "inner descent steps");
  cmd->add_option("--test-updates", o->test_updates,
                  "policy-extraction updates at test time (1 or 5)");
  cmd->add_option("--epochs", o->epochs, "training epochs");
  cmd->add_flag("--expert-oracle", o->expert_oracle,
                "evaluate the scripted expert instead of learned policies");
}

tivc::ExperimentConfig ResolveConfig(const Overrides& o) {
  tivc::ExperimentConfig config = o.config_path.empty()
                                      ? tivc::ExperimentConfig{}
                                      : tivc::LoadConfig(o.config_path);
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (!o.seeds.empty()) config.seeds = o.seeds;
  if (!o.kinds.empty()) {
    config.kinds.clear();
    for (const std::string& name : o.kinds) {
      config.kinds.push_back(tivc::CostKindFromName(name));
    }
  }
  if (!o.context.empty()) {
    if (o.context != "a" && o.context != "b" && o.context != "c") {
      throw tivc::ArgumentError("context must be one of a, b, c");
    }
    config.context = o.context[0];
  }
  if (!o.env.empty()) config.env = tivc::EnvFromName(o.env);
  if (o.inner_steps > 0) config.inner_steps = o.inner_steps;
  if (o.test_updates > 0) {
    if (o.test_updates != 1 && o.test_updates != 5) {
      throw tivc::ArgumentError("--test-updates accepts 1 or 5");
    }
    config.test_updates = o.test_updates;
  }
  if (o.epochs >= 0) config.epochs = o.epochs;
  if (o.expert_oracle) config.expert_oracle = true;
  return config;
}

void PrintFiles(const std::vector<std::string>& files) {
  for (const std::string& f : files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tivc: time-invariant cost learning from misaligned demonstrations"};
  app.require_subcommand(1);

  Overrides o;
  std::string stage;
  for (const char* name : {"gen-demos", "train", "eval", "ablate"}) {
    CLI::App* cmd = app.add_subcommand(name);
    AddCommonOptions(cmd, &o);
    cmd->callback([&stage, name] { stage = name; });
  }
  CLI::App* grad = app.add_subcommand(
      "grad-check", "run the gradient verification battery");
  grad->callback([&stage] { stage = "grad-check"; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (stage == "grad-check") {
      const int failures = tivc::PrintGradientBattery(std::cout);
      return failures == 0 ? kExitOk : kExitNumeric;
    }
    const tivc::ExperimentConfig config = ResolveConfig(o);
    if (stage == "gen-demos") {
      PrintFiles(tivc::CmdGenDemos(config));
    } else if (stage == "train") {
      PrintFiles(tivc::CmdTrain(config));
    } else if (stage == "eval") {
      PrintFiles(tivc::CmdEval(config));
    } else if (stage == "ablate") {
      PrintFiles(tivc::CmdAblate(config));
    }
    return kExitOk;
  } catch (const tivc::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const tivc::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const tivc::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
