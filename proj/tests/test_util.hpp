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

#ifndef GANC_TESTS_TEST_UTIL_HPP_
#define GANC_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <vector>

#include "ganc/image.hpp"
#include "ganc/rng.hpp"
#include "ganc/token_grid.hpp"

namespace ganc::testutil {

// Deterministic pseudo-random image with full [-0.5, 0.5] dynamic range.
inline Image random_image(int height, int width, std::uint32_t seed) {
  DeterministicRng rng(seed);
  Image img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.set(y, x, c, rng.uniform(kPixelMin, kPixelMax));
      }
    }
  }
  return img;
}

inline Image constant_image(int height, int width, float value) {
  Image img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) img.set(y, x, c, value);
    }
  }
  return img;
}

// Smooth low-frequency image; useful where noise would defeat a metric.
inline Image gradient_image(int height, int width) {
  Image img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float fy = static_cast<float>(y) / static_cast<float>(height);
      const float fx = static_cast<float>(x) / static_cast<float>(width);
      img.set(y, x, 0, fy - 0.5f);
      img.set(y, x, 1, fx - 0.5f);
      img.set(y, x, 2, 0.5f * (fx + fy) - 0.5f);
    }
  }
  return img;
}

inline TokenGrid random_grid(int rows, int cols, int bits,
                             std::uint32_t seed) {
  DeterministicRng rng(seed);
  std::vector<std::uint64_t> tokens;
  tokens.reserve(static_cast<std::size_t>(rows) * cols);
  const std::uint64_t span =
      bits >= 64 ? 0 : (std::uint64_t{1} << bits);
  for (int i = 0; i < rows * cols; ++i) {
    tokens.push_back(span == 0 ? rng.next_u64() : rng.below(span));
  }
  return TokenGrid(rows, cols, bits, std::move(tokens));
}

}  // namespace ganc::testutil

#endif  // GANC_TESTS_TEST_UTIL_HPP_
