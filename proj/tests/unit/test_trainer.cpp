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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "tivc/trainer.hpp"

namespace tivc {
namespace {

using test::MakeTrajectory;

Demonstration FixedGoalDemo(double duration, double jitter = 0.0,
                            uint64_t seed = 0) {
  Task task;
  task.kind = TaskKind::kPlacement;
  task.goal = Vec3{0.0, 10.0, 0.0};
  task.duration_s = duration;
  return ExpertDemo(task, jitter, seed);
}

// goal-attraction quadratic: poly weights 1 on the first power of each dim
CostParams QuadraticGoalCost() {
  CostParams params = InitParams(CostKind::kPoly, 3.0, 0);
  for (double& w : params.flat) w = 0.0;
  for (int dim = 0; dim < kStateDims; ++dim) {
    params.flat[static_cast<size_t>(dim) * kPolyPowers + 1] = 1.0;
  }
  return params;
}

TEST_CASE("irl loss of identical trajectories is zero") {
  const Demonstration demo = FixedGoalDemo(3.0);
  CHECK(IrlLoss(demo.trajectory, demo.trajectory) == 0.0);
}

TEST_CASE("a constant one-centimeter offset gives loss one") {
  const Trajectory a =
      MakeTrajectory({Vec3{0, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 2, 0}});
  const Trajectory b =
      MakeTrajectory({Vec3{1, 0, 0}, Vec3{1, 1, 0}, Vec3{1, 2, 0}});
  CHECK(IrlLoss(a, b) == doctest::Approx(1.0));
}

TEST_CASE("irl loss matches a direct summation oracle") {
  Rng rng(0);
  std::vector<Vec3> pa, pb;
  for (int t = 0; t <= 5; ++t) {
    pa.push_back(Vec3{rng.Uniform(-2, 2), rng.Uniform(-2, 2),
                      rng.Uniform(-2, 2)});
    pb.push_back(Vec3{rng.Uniform(-2, 2), rng.Uniform(-2, 2),
                      rng.Uniform(-2, 2)});
  }
  double expected = 0.0;
  for (size_t t = 0; t < pa.size(); ++t) {
    const Vec3 d = pa[t] - pb[t];
    expected += (d.x * d.x + d.y * d.y + d.z * d.z) / pa.size();
  }
  CHECK(IrlLoss(MakeTrajectory(pa), MakeTrajectory(pb)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("irl loss rejects mismatched lengths") {
  const Trajectory a = MakeTrajectory({Vec3{}, Vec3{0, 1, 0}});
  const Trajectory b = MakeTrajectory({Vec3{}, Vec3{0, 1, 0}, Vec3{0, 2, 0}});
  CHECK_THROWS_AS(IrlLoss(a, b), Error);
}

TEST_CASE("inner loop with zero rate leaves the actions at zero") {
  const Demonstration demo = FixedGoalDemo(3.0);
  TrainConfig config;
  config.inner_rate = 0.0;
  const std::vector<Vec3> actions =
      InnerOptimize(QuadraticGoalCost(), demo, LambdaScalar{1.0},
                    StartState(), config);
  REQUIRE(actions.size() == static_cast<size_t>(demo.trajectory.steps()));
  for (const Vec3& u : actions) {
    CHECK(u.x == 0.0);
    CHECK(u.y == 0.0);
    CHECK(u.z == 0.0);
  }
}

TEST_CASE("inner loop under a flat cost leaves the actions at zero") {
  const Demonstration demo = FixedGoalDemo(3.0);
  CostParams flat_cost = InitParams(CostKind::kPoly, 3.0, 0);
  for (double& w : flat_cost.flat) w = 0.0;
  TrainConfig config;
  config.inner_rate = 0.5;
  const std::vector<Vec3> actions = InnerOptimize(
      flat_cost, demo, LambdaScalar{1.0}, StartState(), config);
  for (const Vec3& u : actions) {
    CHECK(u.x == 0.0);
    CHECK(u.y == 0.0);
    CHECK(u.z == 0.0);
  }
}

TEST_CASE("one inner step on the quadratic cost matches the closed form") {
  const Demonstration demo = FixedGoalDemo(1.0);  // T = 5
  const int horizon = demo.trajectory.steps();
  REQUIRE(horizon == 5);
  TrainConfig config;
  config.inner_steps = 1;
  config.inner_rate = 0.01;
  const State s0 = StartState();
  const std::vector<Vec3> actions = InnerOptimize(
      QuadraticGoalCost(), demo, LambdaScalar{1.0}, s0, config);

  // with u = 0 every state sits at s0, so the gradient of the per-step mean
  // of |z - g|^2 w.r.t. u_s is 2 (s0 - g) dt (T - s) / (T + 1)
  const Vec3 offset = s0.position - demo.goal;
  for (int s = 0; s < horizon; ++s) {
    const double factor = 2.0 * config.dt * (horizon - s) /
                          (horizon + 1.0);
    CHECK(actions[static_cast<size_t>(s)].x ==
          doctest::Approx(-config.inner_rate * factor * offset.x)
              .epsilon(1e-12));
    CHECK(actions[static_cast<size_t>(s)].z ==
          doctest::Approx(-config.inner_rate * factor * offset.z)
              .epsilon(1e-12));
  }
}

TEST_CASE("outer update with zero rate returns the parameters unchanged") {
  const Demonstration demo = FixedGoalDemo(3.0);
  TrainConfig config;
  config.kind = CostKind::kLambdaRbf;
  config.outer_rate = 0.0;
  const CostParams params =
      InitParams(config.kind, config.base_duration_s(), 0);
  const CostParams updated = OuterUpdate(params, demo, StartState(), config);
  CHECK(updated.flat == params.flat);
}

TEST_CASE("outer update moves along the finite-difference descent direction") {
  const Demonstration demo = FixedGoalDemo(1.0);  // T = 5, keep it tiny
  TrainConfig config;
  config.kind = CostKind::kLambdaRbf;
  config.rbf_centers = 3;
  config.inner_steps = 1;
  config.base_steps = 5;
  const CostParams params =
      InitParams(config.kind, config.base_duration_s(), 0, 3);

  const CostParams updated = OuterUpdate(params, demo, StartState(), config);
  std::vector<double> step(params.flat.size());
  for (size_t i = 0; i < step.size(); ++i) {
    step[i] = updated.flat[i] - params.flat[i];
  }

  // objective value at phi for the finite-difference probe
  const auto objective = [&](const CostParams& p) {
    const std::vector<Vec3> actions = InnerOptimize(
        p, demo, TemporalScalar(config.base_steps, demo.trajectory.steps()),
        StartState(), config);
    return IrlLoss(Rollout(StartState(), actions, config.dt),
                   demo.trajectory);
  };
  const double eps = 1e-5;
  double dot = 0.0;
  CostParams probe = params;
  for (size_t i = 0; i < params.flat.size(); ++i) {
    const double saved = probe.flat[i];
    probe.flat[i] = saved + eps;
    const double hi = objective(probe);
    probe.flat[i] = saved - eps;
    const double lo = objective(probe);
    probe.flat[i] = saved;
    dot += step[i] * (-(hi - lo) / (2.0 * eps));
  }
  CHECK(dot > 0.0);
}

TEST_CASE("a small outer update does not increase the loss") {
  const Demonstration demo = FixedGoalDemo(1.0);
  TrainConfig config;
  config.kind = CostKind::kLambdaRbf;
  config.rbf_centers = 3;
  config.base_steps = 5;
  config.outer_rate = 1e-3;
  const CostParams params =
      InitParams(config.kind, config.base_duration_s(), 0, 3);
  const LambdaScalar lam =
      TemporalScalar(config.base_steps, demo.trajectory.steps());

  const auto loss_at = [&](const CostParams& p) {
    const std::vector<Vec3> actions =
        InnerOptimize(p, demo, lam, StartState(), config);
    return IrlLoss(Rollout(StartState(), actions, config.dt),
                   demo.trajectory);
  };
  const double before = loss_at(params);
  const double after =
      loss_at(OuterUpdate(params, demo, StartState(), config));
  CHECK(after <= before + 1e-6);
}

TEST_CASE("zero epochs return the initial parameters") {
  const std::vector<Demonstration> demos{FixedGoalDemo(3.0)};
  TrainConfig config;
  config.kind = CostKind::kRbf;
  config.epochs = 0;
  const auto [trained, history] = Train(config, demos);
  CHECK(trained.flat ==
        InitParams(config.kind, config.base_duration_s(), config.seed).flat);
  CHECK(history.records.empty());
}

TEST_CASE("training is deterministic under a fixed seed") {
  std::vector<Demonstration> demos;
  Rng rng(4242);
  for (int i = 0; i < 4; ++i) {
    demos.push_back(FixedGoalDemo(i < 2 ? 3.0 : 5.0,
                                  rng.Uniform(-0.2, 0.2),
                                  static_cast<uint64_t>(i)));
  }
  TrainConfig config;
  config.kind = CostKind::kLambdaRbf;
  config.epochs = 12;
  config.seed = 1;
  const auto [first, history_a] = Train(config, demos);
  const auto [second, history_b] = Train(config, demos);
  CHECK(first.flat == second.flat);
  REQUIRE(history_a.records.size() == history_b.records.size());
  REQUIRE(history_a.records.size() == 12u * demos.size());
  for (size_t i = 0; i < history_a.records.size(); ++i) {
    CHECK(history_a.records[i].irl_loss == history_b.records[i].irl_loss);
    CHECK(history_a.records[i].speed_error ==
          history_b.records[i].speed_error);
    CHECK(history_a.records[i].demo_index == history_b.records[i].demo_index);
  }
}

TEST_CASE("training loss trends down on a short lambda-rbf run") {
  std::vector<Demonstration> demos;
  Rng rng(4242);
  for (int i = 0; i < 4; ++i) {
    demos.push_back(FixedGoalDemo(i < 2 ? 3.0 : 5.0, rng.Uniform(-0.2, 0.2),
                                  static_cast<uint64_t>(i)));
  }
  TrainConfig config;
  config.kind = CostKind::kLambdaRbf;
  config.epochs = 60;
  config.outer_rate = 1.0;
  config.inner_rate = 0.1;
  config.inner_steps = 10;
  config.base_steps = 25;
  const auto [trained, history] = Train(config, demos);

  auto epoch_loss = [&](int epoch) {
    double sum = 0.0;
    for (size_t i = 0; i < demos.size(); ++i) {
      sum += history.records[static_cast<size_t>(epoch) * demos.size() + i]
                 .irl_loss;
    }
    return sum / static_cast<double>(demos.size());
  };
  CHECK(epoch_loss(59) < 0.25 * epoch_loss(0));
}

TEST_CASE("a demo with the wrong control period is rejected") {
  Demonstration demo = FixedGoalDemo(3.0);
  demo.trajectory.dt = 0.1;
  const std::vector<Demonstration> demos{demo};
  TrainConfig config;
  CHECK_THROWS_AS(Train(config, demos), ArgumentError);
}

}  // namespace
}  // namespace tivc
