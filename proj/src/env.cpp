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

#include "tivc/env.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tivc {

int Task::horizon() const {
  const long long t = std::llround(duration_s * frequency_hz);
  if (t < 1) {
    throw ArgumentError("task horizon must be at least one step");
  }
  return static_cast<int>(t);
}

State DynStep(const State& s, const Vec3& u, double dt) {
  return State{s.position + u * dt, u};
}

Trajectory Rollout(const State& s0, std::span<const Vec3> actions, double dt) {
  if (actions.empty()) {
    throw ArgumentError("Rollout: need at least one action");
  }
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(actions.size() + 1);
  traj.states.push_back(s0);
  for (const Vec3& u : actions) {
    traj.states.push_back(DynStep(traj.states.back(), u, dt));
  }
  return traj;
}

std::vector<Var> RolloutPositions(Tape& tape, const Vec3& start,
                                  std::span<const Var> actions, double dt) {
  const size_t t_steps = actions.size() / 3;
  std::vector<Var> positions;
  positions.reserve(3 * (t_steps + 1));
  positions.push_back(tape.constant(start.x));
  positions.push_back(tape.constant(start.y));
  positions.push_back(tape.constant(start.z));
  for (size_t t = 0; t < t_steps; ++t) {
    for (size_t k = 0; k < 3; ++k) {
      positions.push_back(
          tape.axpy_const(positions[3 * t + k], actions[3 * t + k], dt));
    }
  }
  return positions;
}

double PathLength(const Trajectory& traj) {
  double length = 0.0;
  for (int t = 0; t < traj.steps(); ++t) {
    length += (traj.states[t + 1].position - traj.states[t].position).norm();
  }
  return length;
}

namespace {

constexpr double kForwardPhase = 0.6;  // fraction of the horizon spent level

// expert position at phase p in [0, 1]; piecewise linear through the
// waypoint directly above the goal
Vec3 ExpertPosition(const Vec3& start, const Vec3& waypoint, const Vec3& goal,
                    double p) {
  if (p <= kForwardPhase) {
    return start + (waypoint - start) * (p / kForwardPhase);
  }
  return waypoint + (goal - waypoint) * ((p - kForwardPhase) /
                                         (1.0 - kForwardPhase));
}

}  // namespace

Demonstration ExpertDemo(const Task& task, double duration_jitter_s,
                         uint64_t seed) {
  if (task.goal.z > task.start.z) {
    throw ArgumentError(
        "expert strategy descends onto the goal; goal above the start "
        "height is unreachable");
  }
  const double total_s = task.duration_s + duration_jitter_s;
  const long long steps = std::llround(total_s * task.frequency_hz);
  if (steps < 2) {
    throw ArgumentError("demo duration too short for a two-phase path");
  }
  const int horizon = static_cast<int>(steps);
  const double dt = task.dt();
  const Vec3 waypoint{task.goal.x, task.goal.y, task.start.z};

  Trajectory traj;
  traj.dt = dt;
  traj.states.resize(static_cast<size_t>(horizon) + 1);
  for (int t = 0; t <= horizon; ++t) {
    Vec3 pos;
    if (t == 0) {
      pos = task.start;
    } else if (t == horizon) {
      pos = task.goal;  // pinned so the goal-equality invariant is exact
    } else {
      pos = ExpertPosition(task.start, waypoint, task.goal,
                           static_cast<double>(t) / horizon);
    }
    Vec3 vel{0.0, 0.0, 0.0};
    if (t > 0) {
      vel = (pos - traj.states[static_cast<size_t>(t) - 1].position) *
            (1.0 / dt);
    }
    traj.states[static_cast<size_t>(t)] = State{pos, vel};
  }

  Demonstration demo;
  demo.trajectory = std::move(traj);
  demo.goal = task.goal;
  demo.seed = seed;
  if (duration_jitter_s == 0.0) {
    demo.speed_class = SpeedClass::kAligned;
  } else {
    demo.speed_class = total_s < 4.0 ? SpeedClass::kFast : SpeedClass::kSlow;
  }
  return demo;
}

std::vector<Task> SampleTasks(TaskKind kind, const Vec3& center,
                              double radius_cm, int n,
                              std::span<const double> durations_s,
                              uint64_t seed) {
  if (!(radius_cm > 0.0) || n <= 0) {
    throw ArgumentError("SampleTasks: radius and count must be positive");
  }
  Rng rng(seed);
  std::vector<Task> tasks;
  tasks.reserve(static_cast<size_t>(n) * durations_s.size());
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * rng.Uniform();
    const double r = radius_cm * std::sqrt(rng.Uniform());
    const Vec3 goal{center.x + r * std::cos(angle),
                    center.y + r * std::sin(angle), center.z};
    for (double duration : durations_s) {
      Task task;
      task.kind = kind;
      task.goal = goal;
      task.duration_s = duration;
      tasks.push_back(task);
    }
  }
  return tasks;
}

Outcome PlacementOutcome(const Trajectory& traj, const Task& task) {
  if (task.kind != TaskKind::kPlacement) {
    throw ArgumentError("PlacementOutcome: task is not a placement task");
  }
  Outcome out;
  out.final_distance = Distance(traj.final_position(), task.goal);
  for (const State& s : traj.states) {
    if (s.position.z < task.table_height_z &&
        s.position.y < task.table_edge_y) {
      out.strategy_violation = true;
      break;
    }
  }
  out.achieved_speed =
      traj.duration() > 0.0 ? PathLength(traj) / traj.duration() : 0.0;
  return out;
}

Outcome InsertionSuccess(const Trajectory& traj, const Task& task) {
  if (task.kind != TaskKind::kPegInHole) {
    throw ArgumentError("InsertionSuccess: task is not a peg-in-hole task");
  }
  Outcome out;
  auto axis_distance = [&](const Vec3& p) {
    return Vec3{p.x - task.goal.x, p.y - task.goal.y, 0.0}.norm_xy();
  };
  const int n = static_cast<int>(traj.states.size());
  for (int t = 0; t + 1 < n && !out.inserted; ++t) {
    const double z0 = traj.states[static_cast<size_t>(t)].position.z;
    const double z1 = traj.states[static_cast<size_t>(t) + 1].position.z;
    if (!(z0 > task.hole_top_z && z1 <= task.hole_top_z)) continue;
    // downward crossing of the hole mouth between t and t+1; the entry state
    // must be on axis and every later state must stay inside the bore
    bool contained =
        axis_distance(traj.states[static_cast<size_t>(t) + 1].position) <=
        task.hole_radius;
    for (int s = t + 2; contained && s < n; ++s) {
      contained = axis_distance(traj.states[static_cast<size_t>(s)].position) <=
                  task.hole_radius;
    }
    out.inserted = contained;
  }
  out.final_distance = axis_distance(traj.final_position());
  out.achieved_speed =
      traj.duration() > 0.0 ? PathLength(traj) / traj.duration() : 0.0;
  return out;
}

}  // namespace tivc
