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

#ifndef GANC_CONTAINER_HPP_
#define GANC_CONTAINER_HPP_

// Compressed artifact format: fixed 16-byte header, a raw-or-arithmetic
// token payload, and an optional JPEG fallback section used for the
// decode-time 0.7/0.3 blend.
//
// Byte layout (all multi-byte integers little-endian):
//   magic "GANC" (4 bytes) | version u8 | H u16 | W u16 | patch u8 | L u8 |
//   coding_mode u8 | payload_len u32 | payload | jpeg_len u32 | jpeg bytes
//
// The trailing fallback section is tolerated when absent or malformed:
// decoding then yields the tokens with no JPEG attached.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ganc/image.hpp"
#include "ganc/token_grid.hpp"

namespace ganc {
namespace container {

inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint8_t kMagic[4] = {'G', 'A', 'N', 'C'};

enum class CodingMode : std::uint8_t {
  kRaw = 0,         // tokens packed at L bits each, LSB-first
  kArithmetic = 1,  // adaptive binary range coding (CodedStream payload)
};

struct ContainerHeader {
  std::uint8_t version = kVersion;
  int height = 0;  // pixels, = grid rows * patch
  int width = 0;   // pixels, = grid cols * patch
  int patch = 0;
  int bits = 0;  // L, bits per token
  CodingMode mode = CodingMode::kRaw;
  std::uint32_t payload_len = 0;
};

struct DecodedContainer {
  TokenGrid grid;
  int patch = 0;
  CodingMode mode = CodingMode::kRaw;
  // Present only when a well-formed, non-empty fallback section was found.
  std::optional<std::vector<std::uint8_t>> jpeg;
};

// Byte length of the raw packed payload: ceil(n_tokens * bits / 8).
std::size_t raw_payload_size(int n_tokens, int bits);

// Packs grid tokens LSB-first at grid.bits bits each; trailing pad bits are
// zero. Exact size raw_payload_size(h*w, bits).
std::vector<std::uint8_t> pack_tokens_raw(const TokenGrid& grid);

// Inverse of pack_tokens_raw. The byte count must match exactly.
TokenGrid unpack_tokens_raw(std::span<const std::uint8_t> bytes, int rows,
                            int cols, int bits);

// Serializes header, payload, and fallback section. model_order selects the
// adaptive context order for CodingMode::kArithmetic and is ignored for raw
// mode. Grid dimensions scaled by patch must fit u16.
std::vector<std::uint8_t> serialize(
    const TokenGrid& grid, int patch, CodingMode mode, int model_order,
    const std::optional<std::vector<std::uint8_t>>& jpeg = std::nullopt);

// Exact inverse of serialize. Raises kFormat for bad magic/version/field
// values and kTruncation when header or payload bytes are missing. A
// malformed fallback section is tolerated and dropped.
DecodedContainer deserialize(std::span<const std::uint8_t> bytes);

// Fallback activation policy. target = (H*W*3)/8 bytes; active only when
// 100 < current_size < target. Tries qualities 1, 5, 10, 15 in order and
// returns the first encoding that fits in target - current_size. An encoder
// failure (exception or empty result) skips that quality. Returns nullopt
// when inactive, when no quality fits, or when no encoder is supplied.
std::optional<std::vector<std::uint8_t>> jpeg_fallback_select(
    std::size_t current_size, int height, int width,
    const std::function<std::vector<std::uint8_t>(int quality)>& jpeg_encode);

// Decode-time blend: 0.7 * neural + 0.3 * base, clamped to the pixel range.
Image blend_decode(const Image& neural, const Image& base);

}  // namespace container
}  // namespace ganc

#endif  // GANC_CONTAINER_HPP_
