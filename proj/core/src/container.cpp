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

#include "ganc/container.hpp"

#include <algorithm>
#include <cstring>

#include "ganc/coder.hpp"
#include "ganc/error.hpp"
#include "bytes.hpp"

namespace ganc {
namespace container {

namespace {

constexpr std::size_t kFallbackLenSize = 4;

ContainerHeader parse_header(detail::ByteReader& in) {
  std::uint8_t magic[4];
  for (auto& b : magic) b = in.u8("container header");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    raise(ErrorKind::kFormat, "container: bad magic");
  }
  ContainerHeader h;
  h.version = in.u8("container header");
  if (h.version != kVersion) {
    raise(ErrorKind::kFormat,
          "container: unsupported version " + std::to_string(h.version));
  }
  h.height = in.u16le("container header");
  h.width = in.u16le("container header");
  h.patch = in.u8("container header");
  h.bits = in.u8("container header");
  const std::uint8_t mode = in.u8("container header");
  h.payload_len = in.u32le("container header");
  if (mode > 1) {
    raise(ErrorKind::kFormat,
          "container: unknown coding mode " + std::to_string(mode));
  }
  h.mode = static_cast<CodingMode>(mode);
  if (h.patch < 1) raise(ErrorKind::kFormat, "container: patch must be >= 1");
  if (h.bits < 1 || h.bits > 64) {
    raise(ErrorKind::kFormat,
          "container: bits per token must be in [1, 64], got " +
              std::to_string(h.bits));
  }
  if (h.height < 1 || h.width < 1 || h.height % h.patch != 0 ||
      h.width % h.patch != 0) {
    raise(ErrorKind::kFormat, "container: dims " + std::to_string(h.height) +
                                  "x" + std::to_string(h.width) +
                                  " not divisible by patch " +
                                  std::to_string(h.patch));
  }
  return h;
}

}  // namespace

std::size_t raw_payload_size(int n_tokens, int bits) {
  if (n_tokens < 0 || bits < 1 || bits > 64) {
    raise(ErrorKind::kBadArgument, "raw_payload_size: invalid arguments");
  }
  const std::uint64_t total_bits =
      static_cast<std::uint64_t>(n_tokens) * static_cast<std::uint64_t>(bits);
  return static_cast<std::size_t>((total_bits + 7) / 8);
}

std::vector<std::uint8_t> pack_tokens_raw(const TokenGrid& grid) {
  grid.validate();
  const std::size_t n = grid.tokens.size();
  std::vector<std::uint8_t> out(raw_payload_size(static_cast<int>(n),
                                                 grid.bits),
                                0);
  std::uint64_t bit_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t token = grid.tokens[i];
    for (int b = 0; b < grid.bits; ++b, ++bit_pos) {
      if ((token >> b) & 1u) {
        out[bit_pos >> 3] |= static_cast<std::uint8_t>(1u << (bit_pos & 7));
      }
    }
  }
  return out;
}

TokenGrid unpack_tokens_raw(std::span<const std::uint8_t> bytes, int rows,
                            int cols, int bits) {
  if (rows < 1 || cols < 1 || bits < 1 || bits > 64) {
    raise(ErrorKind::kBadArgument, "unpack_tokens_raw: invalid dimensions");
  }
  const std::size_t n =
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  const std::size_t expected = raw_payload_size(static_cast<int>(n), bits);
  if (bytes.size() != expected) {
    raise(ErrorKind::kFormat,
          "unpack_tokens_raw: payload is " + std::to_string(bytes.size()) +
              " bytes, expected " + std::to_string(expected));
  }
  TokenGrid grid;
  grid.h = rows;
  grid.w = cols;
  grid.bits = bits;
  grid.tokens.assign(n, 0);
  std::uint64_t bit_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t token = 0;
    for (int b = 0; b < bits; ++b, ++bit_pos) {
      const std::uint64_t bit = (bytes[bit_pos >> 3] >> (bit_pos & 7)) & 1u;
      token |= bit << b;
    }
    grid.tokens[i] = token;
  }
  return grid;
}

std::vector<std::uint8_t> serialize(
    const TokenGrid& grid, int patch, CodingMode mode, int model_order,
    const std::optional<std::vector<std::uint8_t>>& jpeg) {
  grid.validate();
  if (patch < 1 || patch > 255) {
    raise(ErrorKind::kBadArgument,
          "serialize: patch must be in [1, 255], got " +
              std::to_string(patch));
  }
  const long long height = static_cast<long long>(grid.h) * patch;
  const long long width = static_cast<long long>(grid.w) * patch;
  if (height > 0xFFFF || width > 0xFFFF) {
    raise(ErrorKind::kFormat, "serialize: image dims " +
                                  std::to_string(height) + "x" +
                                  std::to_string(width) + " exceed u16");
  }

  std::vector<std::uint8_t> payload;
  if (mode == CodingMode::kRaw) {
    payload = pack_tokens_raw(grid);
  } else if (mode == CodingMode::kArithmetic) {
    coder::AdaptiveBitModel model(model_order, grid.bits);
    payload = coder::ac_encode(grid.tokens, grid.bits, model).to_bytes();
  } else {
    raise(ErrorKind::kBadArgument, "serialize: unknown coding mode");
  }
  if (payload.size() > 0xFFFFFFFFull) {
    raise(ErrorKind::kFormat, "serialize: payload exceeds u32 length");
  }

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + payload.size() + kFallbackLenSize +
              (jpeg ? jpeg->size() : 0));
  out.insert(out.end(), kMagic, kMagic + 4);
  detail::put_u8(out, kVersion);
  detail::put_u16le(out, static_cast<std::uint16_t>(height));
  detail::put_u16le(out, static_cast<std::uint16_t>(width));
  detail::put_u8(out, static_cast<std::uint8_t>(patch));
  detail::put_u8(out, static_cast<std::uint8_t>(grid.bits));
  detail::put_u8(out, static_cast<std::uint8_t>(mode));
  detail::put_u32le(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  if (jpeg && !jpeg->empty()) {
    if (jpeg->size() > 0xFFFFFFFFull) {
      raise(ErrorKind::kFormat, "serialize: jpeg exceeds u32 length");
    }
    detail::put_u32le(out, static_cast<std::uint32_t>(jpeg->size()));
    out.insert(out.end(), jpeg->begin(), jpeg->end());
  } else {
    detail::put_u32le(out, 0);
  }
  return out;
}

DecodedContainer deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  const ContainerHeader h = parse_header(in);
  const std::span<const std::uint8_t> payload =
      in.take(h.payload_len, "container payload");

  const int rows = h.height / h.patch;
  const int cols = h.width / h.patch;
  const std::size_t n_tokens =
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);

  DecodedContainer result;
  result.patch = h.patch;
  result.mode = h.mode;
  if (h.mode == CodingMode::kRaw) {
    result.grid = unpack_tokens_raw(payload, rows, cols, h.bits);
  } else {
    const coder::CodedStream stream = coder::CodedStream::from_bytes(payload);
    if (stream.n_tokens != n_tokens) {
      raise(ErrorKind::kFormat,
            "container: coded stream holds " +
                std::to_string(stream.n_tokens) + " tokens, header implies " +
                std::to_string(n_tokens));
    }
    if (stream.bits_per_token != h.bits) {
      raise(ErrorKind::kFormat,
            "container: coded stream bits per token disagree with header");
    }
    auto model = coder::make_model(stream.model_id, stream.model_params,
                                   stream.bits_per_token);
    result.grid.h = rows;
    result.grid.w = cols;
    result.grid.bits = h.bits;
    result.grid.tokens = coder::ac_decode(stream, *model);
    result.grid.validate();
  }

  // Fallback section: any malformation past this point degrades to
  // tokens-only rather than failing the decode.
  if (in.remaining() >= kFallbackLenSize) {
    const std::uint32_t jpeg_len = in.u32le("fallback length");
    if (jpeg_len > 0 && jpeg_len <= in.remaining()) {
      const auto jpeg = in.take(jpeg_len, "fallback bytes");
      result.jpeg.emplace(jpeg.begin(), jpeg.end());
    }
  }
  return result;
}

std::optional<std::vector<std::uint8_t>> jpeg_fallback_select(
    std::size_t current_size, int height, int width,
    const std::function<std::vector<std::uint8_t>(int quality)>& jpeg_encode) {
  if (height < 1 || width < 1) {
    raise(ErrorKind::kBadArgument, "jpeg_fallback_select: invalid dims");
  }
  if (!jpeg_encode) return std::nullopt;
  const std::size_t target =
      (static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * 3) /
      8;
  if (current_size >= target || current_size <= 100) return std::nullopt;
  const std::size_t remaining = target - current_size;
  for (const int quality : {1, 5, 10, 15}) {
    std::vector<std::uint8_t> encoded;
    try {
      encoded = jpeg_encode(quality);
    } catch (const std::exception&) {
      continue;
    }
    if (!encoded.empty() && encoded.size() <= remaining) return encoded;
  }
  return std::nullopt;
}

Image blend_decode(const Image& neural, const Image& base) {
  require_same_shape(neural, base);
  Image out(neural.height(), neural.width());
  for (int y = 0; y < neural.height(); ++y) {
    for (int x = 0; x < neural.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const double blended = 0.7 * static_cast<double>(neural.at(y, x, c)) +
                               0.3 * static_cast<double>(base.at(y, x, c));
        out.set(y, x, c, static_cast<float>(blended));
      }
    }
  }
  return out;
}

}  // namespace container
}  // namespace ganc
