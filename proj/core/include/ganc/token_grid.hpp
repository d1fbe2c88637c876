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

#ifndef GANC_TOKEN_GRID_HPP_
#define GANC_TOKEN_GRID_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ganc/error.hpp"

namespace ganc {

/// Upper bound (exclusive) on token values for a codebook of `bits` bits.
/// For bits == 64 every uint64 value is a valid token.
inline bool token_in_range(std::uint64_t token, int bits) {
  return bits >= 64 || token < (std::uint64_t{1} << bits);
}

/// h x w grid of token indices, each in [0, 2^bits). Row-major.
struct TokenGrid {
  int h = 0;
  int w = 0;
  int bits = 0;
  std::vector<std::uint64_t> tokens;

  TokenGrid() = default;

  TokenGrid(int h_, int w_, int bits_, std::vector<std::uint64_t> tokens_)
      : h(h_), w(w_), bits(bits_), tokens(std::move(tokens_)) {
    validate();
  }

  std::uint64_t at(int row, int col) const {
    return tokens[static_cast<std::size_t>(row) * w + col];
  }

  void validate() const {
    if (h < 1 || w < 1) {
      raise(ErrorKind::kShape, "token grid dimensions must be positive, got " +
                                   std::to_string(h) + "x" + std::to_string(w));
    }
    if (bits < 1 || bits > 64) {
      raise(ErrorKind::kDomain,
            "codebook bits must be in [1, 64], got " + std::to_string(bits));
    }
    if (tokens.size() != static_cast<std::size_t>(h) * w) {
      raise(ErrorKind::kShape, "token grid buffer size does not match " +
                                   std::to_string(h) + "x" + std::to_string(w));
    }
    for (std::uint64_t t : tokens) {
      if (!token_in_range(t, bits)) {
        raise(ErrorKind::kDomain, "token " + std::to_string(t) +
                                      " out of range for " +
                                      std::to_string(bits) + " bits");
      }
    }
  }

  bool operator==(const TokenGrid& other) const {
    return h == other.h && w == other.w && bits == other.bits &&
           tokens == other.tokens;
  }
};

}  // namespace ganc

#endif  // GANC_TOKEN_GRID_HPP_
