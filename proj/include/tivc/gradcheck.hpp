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

#ifndef TIVC_GRADCHECK_HPP_
#define TIVC_GRADCHECK_HPP_

#include <cstdint>
#include <ostream>
#include <vector>

#include "tivc/costs.hpp"

namespace tivc {

// Verification battery: per cost kind, randomized first-order checks of the
// cost gradient w.r.t. joint (params, actions), and finite-difference checks
// of the unrolled outer gradient w.r.t. params.
struct GradCheckSummary {
  CostKind kind = CostKind::kPoly;
  int first_order_instances = 0;
  int bilevel_instances = 0;
  double first_order_worst = 0.0;  // max relative error seen
  double bilevel_worst = 0.0;

  static constexpr double kFirstOrderTol = 1e-5;
  static constexpr double kBilevelTol = 1e-4;
  bool pass() const {
    return first_order_worst < kFirstOrderTol && bilevel_worst < kBilevelTol;
  }
};

std::vector<GradCheckSummary> RunGradientBattery(int first_order_instances,
                                                 int bilevel_instances,
                                                 uint64_t seed);

// prints one row per kind; returns the number of failing kinds
int PrintGradientBattery(std::ostream& os, int first_order_instances = 20,
                         int bilevel_instances = 10, uint64_t seed = 4);

}  // namespace tivc

#endif  // TIVC_GRADCHECK_HPP_
