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

#ifndef TIVC_ENV_HPP_
#define TIVC_ENV_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "tivc/common.hpp"
#include "tivc/diffcore.hpp"

namespace tivc {

struct State {
  Vec3 position;  // cm
  Vec3 velocity;  // cm/s, for reporting; costs read positions only
};

// Time-indexed state sequence with a uniform control period.
struct Trajectory {
  std::vector<State> states;  // length T + 1
  double dt = 0.2;            // seconds

  int steps() const { return static_cast<int>(states.size()) - 1; }
  double duration() const { return steps() * dt; }
  double timestamp(int t) const { return t * dt; }
  const Vec3& final_position() const { return states.back().position; }
};

enum class TaskKind { kPlacement, kPegInHole };

// Desk-scale task: goal, timing, and the fixed workspace geometry.
// The hand is commanded in Cartesian space from a fixed start; placement
// must clear the table edge before descending, peg-in-hole must enter the
// hole mouth on axis.
struct Task {
  TaskKind kind = TaskKind::kPlacement;
  Vec3 goal;              // cm; for peg-in-hole this is the hole bottom
  double duration_s = 3.0;
  double frequency_hz = 5.0;

  Vec3 start{0.0, 0.0, 10.0};
  double table_edge_y = 8.0;    // placement: edge plane y = const
  double table_height_z = 0.0;  // placement: tabletop height
  double hole_radius = 0.5;     // peg-in-hole, cm
  double hole_top_z = 1.0;      // peg-in-hole: hole mouth height

  double dt() const { return 1.0 / frequency_hz; }
  int horizon() const;  // duration * frequency, validated integral
};

enum class SpeedClass { kAligned, kFast, kSlow };

struct Demonstration {
  Trajectory trajectory;
  Vec3 goal;  // equals the trajectory's final position exactly
  SpeedClass speed_class = SpeedClass::kAligned;
  uint64_t seed = 0;
};

struct Outcome {
  double final_distance = 0.0;  // cm; placement: to goal, peg: to hole axis
  bool strategy_violation = false;  // placement only
  bool inserted = false;            // peg-in-hole only
  double achieved_speed = 0.0;      // cm/s, path length over duration
};

// velocity-commanded point mass: position' = position + u * dt
State DynStep(const State& s, const Vec3& u, double dt);

// fold DynStep over an action sequence; length T -> trajectory length T + 1
Trajectory Rollout(const State& s0, std::span<const Vec3> actions, double dt);

// Rollout recorded on a tape for differentiation; `actions` is the flat
// (x, y, z) sequence, the returned positions are flat with the start state
// prepended as constants, length 3 * (T + 1).
std::vector<Var> RolloutPositions(Tape& tape, const Vec3& start,
                                  std::span<const Var> actions, double dt);

// sum of per-step displacement norms, cm
double PathLength(const Trajectory& traj);

// Two-phase scripted expert: the first 60% of the horizon runs level from
// the start to the point directly above the goal, the remainder descends
// vertically onto it. Positions are a pure function of phase t / T, so
// demos of different durations trace the same spatial path.
Demonstration ExpertDemo(const Task& task, double duration_jitter_s,
                         uint64_t seed);

// n goals uniform in the horizontal disc of `radius_cm` around `center`
// (goal height stays at center.z), crossed with `durations_s`
std::vector<Task> SampleTasks(TaskKind kind, const Vec3& center,
                              double radius_cm, int n,
                              std::span<const double> durations_s,
                              uint64_t seed);

// placement metrics; violation = any state below the tabletop while still
// short of the edge plane
Outcome PlacementOutcome(const Trajectory& traj, const Task& task);

// peg-in-hole metrics; insertion requires an on-axis downward crossing of
// the hole mouth and horizontal containment for the rest of the trajectory
Outcome InsertionSuccess(const Trajectory& traj, const Task& task);

}  // namespace tivc

#endif  // TIVC_ENV_HPP_
