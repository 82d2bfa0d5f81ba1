// Copyright 2026 The A2T Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef A2T_RNG_H_
#define A2T_RNG_H_

#include <cstdint>
#include <random>

namespace a2t {

// Deterministic generator used everywhere a seed is accepted.
//
// The engine is MT19937-64 (std::mt19937_64), whose output sequence is fixed
// by the C++ standard. Distributions are derived here rather than through
// <random> distribution classes, whose algorithms vary between standard
// library implementations: uniform doubles take the top 53 bits of one draw,
// normals use the Box-Muller transform on two uniforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform();
  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t UniformInt(std::uint64_t n);
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with a stream index into an independent seed.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace a2t

#endif  // A2T_RNG_H_
