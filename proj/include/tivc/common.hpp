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

#ifndef TIVC_COMMON_HPP_
#define TIVC_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tivc {

// error hierarchy; the CLI maps these onto exit codes
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// bad arguments, bad config, malformed files
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// non-finite values encountered during evaluation or optimization
class NumericError : public Error {
 public:
  using Error::Error;
};

// numeric failure inside a training run, annotated with where it happened
class TrainingError : public NumericError {
 public:
  TrainingError(const std::string& what, int epoch, int demo_index)
      : NumericError(what), epoch(epoch), demo_index(demo_index) {}
  int epoch;
  int demo_index;
};

// a required input file is absent
class MissingInputError : public Error {
 public:
  using Error::Error;
};

// Cartesian point / direction, cm and cm/s at desk scale
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm_xy() const { return std::sqrt(x * x + y * y); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double Distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Deterministic uniform source. std::mt19937_64 has a standard-mandated
// sequence; the double conversion is explicit so results do not depend on
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t Next() { return gen_(); }

  // uniform in [0, 1)
  double Uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // uniform integer in [lo, hi] inclusive
  int UniformInt(int lo, int hi) {
    const int span = hi - lo + 1;
    int v = lo + static_cast<int>(Uniform() * span);
    return v > hi ? hi : v;
  }

  // Fisher-Yates; std::shuffle's draw pattern is unspecified, this is not
  template <class T>
  void Shuffle(std::vector<T>& items) {
    for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
      const int j = UniformInt(0, i);
      std::swap(items[i], items[static_cast<size_t>(j)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tivc

#endif  // TIVC_COMMON_HPP_
