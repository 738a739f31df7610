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
#include "tivc/env.hpp"

namespace tivc {
namespace {

Task PlacementTask(double duration = 3.0) {
  Task task;
  task.kind = TaskKind::kPlacement;
  task.goal = Vec3{0.0, 10.0, 0.0};
  task.duration_s = duration;
  return task;
}

Task PegTask(double duration = 3.0) {
  Task task = PlacementTask(duration);
  task.kind = TaskKind::kPegInHole;
  return task;
}

TEST_CASE("dyn step integrates the velocity command") {
  const State s{Vec3{0, 0, 0}, Vec3{}};
  const State next = DynStep(s, Vec3{1, 0, 0}, 0.2);
  CHECK(next.position.x == doctest::Approx(0.2));
  CHECK(next.position.y == 0.0);
  CHECK(next.position.z == 0.0);
  CHECK(next.velocity.x == 1.0);
}

TEST_CASE("dyn step with zero command holds position") {
  const State s{Vec3{1, 2, 3}, Vec3{4, 5, 6}};
  const State next = DynStep(s, Vec3{}, 0.2);
  CHECK(next.position.x == 1.0);
  CHECK(next.position.y == 2.0);
  CHECK(next.position.z == 3.0);
}

TEST_CASE("fifteen chained unit steps displace by three") {
  State s{Vec3{}, Vec3{}};
  for (int i = 0; i < 15; ++i) s = DynStep(s, Vec3{1, 0, 0}, 0.2);
  CHECK(s.position.x == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("rollout with zero actions stays at the start") {
  const State s0{Vec3{1, -2, 3}, Vec3{}};
  const std::vector<Vec3> actions(8, Vec3{});
  const Trajectory traj = Rollout(s0, actions, 0.2);
  CHECK(traj.steps() == 8);
  for (const State& s : traj.states) {
    CHECK(s.position.x == 1.0);
    CHECK(s.position.y == -2.0);
    CHECK(s.position.z == 3.0);
  }
}

TEST_CASE("single-step rollout is one dyn step") {
  const State s0{Vec3{}, Vec3{}};
  const std::vector<Vec3> actions{Vec3{0.5, -0.5, 2.0}};
  const Trajectory traj = Rollout(s0, actions, 0.2);
  CHECK(traj.states.size() == 2);
  CHECK(traj.states[1].position.x == doctest::Approx(0.1));
  CHECK(traj.states[1].position.z == doctest::Approx(0.4));
}

TEST_CASE("rollout displacement equals dt times the action sum") {
  Rng rng(0);
  std::vector<Vec3> actions(10);
  for (Vec3& u : actions) {
    u = Vec3{rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(-2, 2)};
  }
  const State s0{Vec3{0.4, -1.1, 2.2}, Vec3{}};
  const Trajectory traj = Rollout(s0, actions, 0.2);

  Vec3 sum{};
  for (const Vec3& u : actions) sum = sum + u;
  const Vec3 displacement = traj.final_position() - s0.position;
  CHECK(displacement.x == doctest::Approx(0.2 * sum.x).epsilon(1e-12));
  CHECK(displacement.y == doctest::Approx(0.2 * sum.y).epsilon(1e-12));
  CHECK(displacement.z == doctest::Approx(0.2 * sum.z).epsilon(1e-12));
}

TEST_CASE("expert demo splits the horizon 60/40") {
  const Demonstration demo = ExpertDemo(PlacementTask(3.0), 0.0, 0);
  CHECK(demo.trajectory.steps() == 15);
  // level until step 9, descending after
  for (int t = 0; t <= 9; ++t) {
    CHECK(demo.trajectory.states[static_cast<size_t>(t)].position.z == 10.0);
  }
  for (int t = 10; t <= 15; ++t) {
    const Vec3& p = demo.trajectory.states[static_cast<size_t>(t)].position;
    CHECK(p.z < 10.0);
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(10.0));
  }
  // goal-equality invariant is exact
  CHECK(demo.trajectory.final_position().x == demo.goal.x);
  CHECK(demo.trajectory.final_position().y == demo.goal.y);
  CHECK(demo.trajectory.final_position().z == demo.goal.z);
  CHECK(demo.speed_class == SpeedClass::kAligned);
}

TEST_CASE("expert demo is deterministic") {
  const Demonstration a = ExpertDemo(PlacementTask(3.0), 0.1, 42);
  const Demonstration b = ExpertDemo(PlacementTask(3.0), 0.1, 42);
  REQUIRE(a.trajectory.states.size() == b.trajectory.states.size());
  for (size_t t = 0; t < a.trajectory.states.size(); ++t) {
    CHECK(a.trajectory.states[t].position.x ==
          b.trajectory.states[t].position.x);
    CHECK(a.trajectory.states[t].position.z ==
          b.trajectory.states[t].position.z);
  }
}

TEST_CASE("jittered durations round to the nearest step") {
  CHECK(ExpertDemo(PlacementTask(3.0), -0.2, 0).trajectory.steps() == 14);
  CHECK(ExpertDemo(PlacementTask(3.0), 0.17, 0).trajectory.steps() == 16);
  CHECK(ExpertDemo(PlacementTask(5.0), 0.13, 0).trajectory.steps() == 26);
  CHECK(ExpertDemo(PlacementTask(3.0), -0.2, 0).speed_class ==
        SpeedClass::kFast);
  CHECK(ExpertDemo(PlacementTask(5.0), 0.13, 0).speed_class ==
        SpeedClass::kSlow);
}

TEST_CASE("demos at different durations trace the same spatial path") {
  Task task = PlacementTask(3.0);
  task.goal = Vec3{0.7, 9.3, 0.0};
  const Demonstration base = ExpertDemo(task, 0.0, 0);
  task.duration_s = 6.0;
  const Demonstration stretched = ExpertDemo(task, 0.0, 0);
  REQUIRE(stretched.trajectory.steps() == 2 * base.trajectory.steps());
  for (int t = 0; t <= base.trajectory.steps(); ++t) {
    const Vec3 a = base.trajectory.states[static_cast<size_t>(t)].position;
    const Vec3 b =
        stretched.trajectory.states[static_cast<size_t>(2 * t)].position;
    CHECK(Distance(a, b) < 1e-9);
  }
}

TEST_CASE("goal above the start height is rejected") {
  Task task = PlacementTask(3.0);
  task.goal = Vec3{0.0, 10.0, 11.0};
  CHECK_THROWS_AS(ExpertDemo(task, 0.0, 0), ArgumentError);
}

TEST_CASE("sampled tasks are reproducible and respect the radius") {
  const std::vector<double> durations{2.0, 3.0};
  const Vec3 center{0.0, 10.0, 0.0};
  const std::vector<Task> a =
      SampleTasks(TaskKind::kPlacement, center, 1.0, 10, durations, 7);
  const std::vector<Task> b =
      SampleTasks(TaskKind::kPlacement, center, 1.0, 10, durations, 7);
  REQUIRE(a.size() == 20);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].goal.x == b[i].goal.x);
    CHECK(a[i].goal.y == b[i].goal.y);
    CHECK(Distance(a[i].goal, center) <= 1.0);
    CHECK(a[i].goal.z == 0.0);
  }
}

TEST_CASE("degenerate radius pins goals to the center") {
  const std::vector<double> durations{3.0};
  const Vec3 center{0.0, 10.0, 0.0};
  for (const Task& task :
       SampleTasks(TaskKind::kPegInHole, center, 1e-4, 3, durations, 1)) {
    CHECK(Distance(task.goal, center) <= 1e-4);
  }
}

TEST_CASE("three bins of ten goals and five speeds give 150 tasks") {
  const std::vector<double> durations{2, 3, 4, 5, 6};
  size_t total = 0;
  for (double radius : {1.0, 3.0, 5.0}) {
    total += SampleTasks(TaskKind::kPegInHole, Vec3{0, 10, 0}, radius, 10,
                         durations, 3)
                 .size();
  }
  CHECK(total == 150);
}

TEST_CASE("expert placement runs clean") {
  const Task task = PlacementTask(3.0);
  const Demonstration demo = ExpertDemo(task, 0.0, 0);
  const Outcome outcome = PlacementOutcome(demo.trajectory, task);
  CHECK_FALSE(outcome.strategy_violation);
  CHECK(outcome.final_distance == 0.0);
}

TEST_CASE("descending below the tabletop short of the edge is a violation") {
  using test::MakeTrajectory;
  const Task task = PlacementTask(3.0);
  // dips below z=0 at y=5, then recovers and finishes at the goal
  const Trajectory dip = MakeTrajectory({Vec3{0, 0, 10}, Vec3{0, 5, -0.5},
                                         Vec3{0, 10, 0}});
  CHECK(PlacementOutcome(dip, task).strategy_violation);
  // the same dip past the edge plane is allowed by the predicate
  const Trajectory late_dip = MakeTrajectory({Vec3{0, 0, 10}, Vec3{0, 9, -0.5},
                                              Vec3{0, 10, 0}});
  CHECK_FALSE(PlacementOutcome(late_dip, task).strategy_violation);
}

TEST_CASE("final distance is the euclidean miss") {
  using test::MakeTrajectory;
  const Task task = PlacementTask(3.0);
  const Trajectory traj =
      MakeTrajectory({Vec3{0, 0, 10}, Vec3{0, 10, 1}});
  CHECK(PlacementOutcome(traj, task).final_distance == doctest::Approx(1.0));
}

TEST_CASE("expert peg demo inserts") {
  const Task task = PegTask(3.0);
  const Demonstration demo = ExpertDemo(task, 0.0, 0);
  const Outcome outcome = InsertionSuccess(demo.trajectory, task);
  CHECK(outcome.inserted);
  CHECK(outcome.final_distance == 0.0);
}

TEST_CASE("descending two centimeters off axis is not an insertion") {
  using test::MakeTrajectory;
  const Task task = PegTask(3.0);
  const Trajectory traj = MakeTrajectory(
      {Vec3{2, 10, 10}, Vec3{2, 10, 5}, Vec3{2, 10, 0.5}, Vec3{2, 10, 0}});
  CHECK_FALSE(InsertionSuccess(traj, task).inserted);
}

TEST_CASE("drifting out of the bore after entry is not an insertion") {
  using test::MakeTrajectory;
  const Task task = PegTask(3.0);
  const Trajectory traj = MakeTrajectory(
      {Vec3{0, 10, 10}, Vec3{0, 10, 0.8}, Vec3{1, 10, 0.5}, Vec3{1, 10, 0}});
  CHECK_FALSE(InsertionSuccess(traj, task).inserted);
}

TEST_CASE("entering on axis and staying contained is an insertion") {
  using test::MakeTrajectory;
  const Task task = PegTask(3.0);
  const Trajectory traj =
      MakeTrajectory({Vec3{0, 10, 10}, Vec3{0.2, 10, 0.7}, Vec3{0, 10, 0.1}});
  CHECK(InsertionSuccess(traj, task).inserted);
}

TEST_CASE("path length sums per-step displacements") {
  using test::MakeTrajectory;
  const Trajectory traj =
      MakeTrajectory({Vec3{0, 0, 0}, Vec3{0, 3, 0}, Vec3{0, 3, 4}});
  CHECK(PathLength(traj) == doctest::Approx(7.0));
}

}  // namespace
}  // namespace tivc
