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

#ifndef TIVC_TESTS_HELPERS_HPP_
#define TIVC_TESTS_HELPERS_HPP_

#include <vector>

#include "tivc/env.hpp"

namespace tivc::test {

inline Trajectory MakeTrajectory(const std::vector<Vec3>& positions,
                                 double dt = 0.2) {
  Trajectory traj;
  traj.dt = dt;
  for (size_t i = 0; i < positions.size(); ++i) {
    Vec3 vel{};
    if (i > 0) vel = (positions[i] - positions[i - 1]) * (1.0 / dt);
    traj.states.push_back(State{positions[i], vel});
  }
  return traj;
}

inline Trajectory ConstantTrajectory(const Vec3& position, int steps,
                                     double dt = 0.2) {
  return MakeTrajectory(std::vector<Vec3>(static_cast<size_t>(steps) + 1,
                                          position),
                        dt);
}

}  // namespace tivc::test

#endif  // TIVC_TESTS_HELPERS_HPP_
