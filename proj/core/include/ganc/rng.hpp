// Copyright (c) the ganc project
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

#ifndef GANC_RNG_HPP_
#define GANC_RNG_HPP_

#include <cstdint>
#include <random>

namespace ganc {

/// Deterministic random source for generated weights and test data.
///
/// The mt19937 integer stream is pinned by the C++ standard; the float
/// mappings below are fixed arithmetic on that stream. std::*_distribution
/// is deliberately avoided (its output is implementation-defined), so the
/// same seed produces the same bytes on every platform.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint32_t seed) : gen_(seed) {}

  std::uint32_t next_u32() { return gen_(); }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform in [0, 1), 24 bits of precision.
  float next_float() { return static_cast<float>(next_u32() >> 8) * 0x1.0p-24f; }

  /// Uniform in [0, 1), 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  float uniform(float lo, float hi) { return lo + (hi - lo) * next_float(); }

  /// Integer in [0, n). Uses rejection-free modulo; fine for test data.
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

 private:
  std::mt19937 gen_;
};

}  // namespace ganc

#endif  // GANC_RNG_HPP_
