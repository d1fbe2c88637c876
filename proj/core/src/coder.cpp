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

#include "ganc/coder.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bytes.hpp"
#include "ganc/error.hpp"
#include "ganc/token_grid.hpp"

namespace ganc::coder {

namespace {

constexpr std::uint32_t kTopValue = 1u << 24;

// Carry-propagating binary range coder (64-bit low, 32-bit range, byte-wise
// renormalization). The encoder flushes five bytes so the decoder, which
// primes its code register from five bytes and then pulls exactly one byte
// per renormalization, consumes the payload to the byte.
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

  /// prob_zero is P(bit == 0) scaled to [1, 4095].
  void encode_bit(std::uint32_t prob_zero, int bit) {
    const std::uint32_t bound = (range_ >> kProbabilityBits) * prob_zero;
    if (bit == 0) {
      range_ = bound;
    } else {
      low_ += bound;
      range_ -= bound;
    }
    while (range_ < kTopValue) {
      range_ <<= 8;
      shift_low();
    }
  }

  void flush() {
    for (int i = 0; i < 5; ++i) shift_low();
  }

 private:
  void shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u ||
        static_cast<std::uint32_t>(low_ >> 32) != 0) {
      std::uint8_t carry = static_cast<std::uint8_t>(low_ >> 32);
      do {
        out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
        cache_ = 0xFF;
      } while (--pending_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++pending_;
    low_ = (low_ << 8) & 0xFFFFFFFFull;
  }

  std::vector<std::uint8_t>& out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 1;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(detail::ByteReader& in) : in_(in) {
    // The encoder's first byte is always the zero cache byte, so five bytes
    // fit the 32-bit code register exactly.
    for (int i = 0; i < 5; ++i) {
      code_ = (code_ << 8) | in_.u8("arithmetic payload");
    }
  }

  int decode_bit(std::uint32_t prob_zero) {
    const std::uint32_t bound = (range_ >> kProbabilityBits) * prob_zero;
    int bit;
    if (code_ < bound) {
      range_ = bound;
      bit = 0;
    } else {
      code_ -= bound;
      range_ -= bound;
      bit = 1;
    }
    while (range_ < kTopValue) {
      range_ <<= 8;
      code_ = (code_ << 8) | in_.u8("arithmetic payload");
    }
    return bit;
  }

 private:
  detail::ByteReader& in_;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

void check_bits_per_token(int bits) {
  if (bits < 1 || bits > 64) {
    raise(ErrorKind::kDomain,
          "bits per token must be in [1, 64], got " + std::to_string(bits));
  }
}

}  // namespace

AdaptiveBitModel::AdaptiveBitModel(int order, int bits_per_token)
    : order_(order), bits_per_token_(bits_per_token) {
  if (order < 0 || order > 2) {
    raise(ErrorKind::kDomain,
          "adaptive model order must be 0, 1 or 2, got " +
              std::to_string(order));
  }
  check_bits_per_token(bits_per_token);
  counts_.assign(static_cast<std::size_t>(bits_per_token) << (order + 2), 0);
}

std::size_t AdaptiveBitModel::context_index(const BitContext& ctx) const {
  // Previous `order` bits of the current token, zero-padded when fewer have
  // been coded, plus the same-position bit of the previous token.
  const std::uint32_t mask = (1u << order_) - 1;
  std::uint64_t prev_bits = 0;
  if (order_ > 0) {
    prev_bits = ctx.bit_pos >= static_cast<std::uint32_t>(order_)
                    ? (ctx.current_bits >> (ctx.bit_pos - order_)) & mask
                    : ctx.current_bits;
  }
  const std::uint64_t prev_token_bit = (ctx.prev_token >> ctx.bit_pos) & 1;
  return ((static_cast<std::size_t>(ctx.bit_pos) << (order_ + 1)) |
          (prev_bits << 1) | prev_token_bit)
         << 1;
}

double AdaptiveBitModel::next_bit_probability(const BitContext& ctx) const {
  const std::size_t idx = context_index(ctx);
  const double zeros = counts_[idx];
  const double ones = counts_[idx + 1];
  return (ones + 1.0) / (zeros + ones + 2.0);
}

void AdaptiveBitModel::update(const BitContext& ctx, int bit) {
  ++counts_[context_index(ctx) + (bit ? 1 : 0)];
}

void AdaptiveBitModel::reset() {
  counts_.assign(counts_.size(), 0);
}

std::unique_ptr<ProbabilityModel> make_model(std::uint8_t model_id,
                                             std::uint16_t model_params,
                                             int bits_per_token) {
  switch (model_id) {
    case 0:
      return std::make_unique<StaticUniformModel>();
    case 1:
      return std::make_unique<AdaptiveBitModel>(model_params, bits_per_token);
    default:
      raise(ErrorKind::kFormat,
            "unknown probability model id " + std::to_string(model_id));
  }
}

std::uint32_t quantize_probability(double p_one) {
  if (!(p_one > 0.0 && p_one < 1.0)) {
    raise(ErrorKind::kDomain,
          "bit probability must be in (0, 1), got " + std::to_string(p_one));
  }
  auto q = static_cast<std::uint32_t>(
      std::lround(p_one * static_cast<double>(kProbabilityScale)));
  if (q < 1) q = 1;
  if (q > kProbabilityScale - 1) q = kProbabilityScale - 1;
  return q;
}

std::vector<std::uint8_t> CodedStream::to_bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(8 + payload.size());
  detail::put_u32le(out, n_tokens);
  detail::put_u8(out, bits_per_token);
  detail::put_u8(out, model_id);
  detail::put_u16le(out, model_params);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

CodedStream CodedStream::from_bytes(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  CodedStream s;
  s.n_tokens = in.u32le("coded stream token count");
  s.bits_per_token = in.u8("coded stream bits per token");
  s.model_id = in.u8("coded stream model id");
  s.model_params = in.u16le("coded stream model params");
  auto rest = in.take(in.remaining(), "coded stream payload");
  s.payload.assign(rest.begin(), rest.end());
  return s;
}

CodedStream ac_encode(std::span<const std::uint64_t> tokens,
                      int bits_per_token, ProbabilityModel& model) {
  check_bits_per_token(bits_per_token);
  if (tokens.size() > std::numeric_limits<std::uint32_t>::max()) {
    raise(ErrorKind::kDomain, "token stream too long for u32 count");
  }
  CodedStream stream;
  stream.n_tokens = static_cast<std::uint32_t>(tokens.size());
  stream.bits_per_token = static_cast<std::uint8_t>(bits_per_token);
  stream.model_id = model.model_id();
  stream.model_params = model.model_params();

  RangeEncoder enc(stream.payload);
  std::uint64_t prev_token = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::uint64_t token = tokens[t];
    if (!token_in_range(token, bits_per_token)) {
      raise(ErrorKind::kDomain,
            "ac_encode: token " + std::to_string(token) +
                " out of range for " + std::to_string(bits_per_token) +
                " bits");
    }
    std::uint64_t coded = 0;
    for (int i = 0; i < bits_per_token; ++i) {
      const int bit = static_cast<int>((token >> i) & 1);
      const BitContext ctx{static_cast<std::uint32_t>(i), coded, prev_token};
      const std::uint32_t p_one = quantize_probability(
          model.next_bit_probability(ctx));
      enc.encode_bit(kProbabilityScale - p_one, bit);
      model.update(ctx, bit);
      coded |= static_cast<std::uint64_t>(bit) << i;
    }
    prev_token = token;
  }
  enc.flush();
  return stream;
}

std::vector<std::uint64_t> ac_decode(const CodedStream& stream,
                                     ProbabilityModel& model) {
  check_bits_per_token(stream.bits_per_token);
  if (stream.model_id != model.model_id() ||
      stream.model_params != model.model_params()) {
    raise(ErrorKind::kFormat,
          "ac_decode: stream was coded with model " +
              std::to_string(stream.model_id) + "/" +
              std::to_string(stream.model_params) + ", given model " +
              std::to_string(model.model_id()) + "/" +
              std::to_string(model.model_params()));
  }
  detail::ByteReader in(stream.payload);
  RangeDecoder dec(in);

  std::vector<std::uint64_t> tokens;
  tokens.reserve(stream.n_tokens);
  std::uint64_t prev_token = 0;
  for (std::uint32_t t = 0; t < stream.n_tokens; ++t) {
    std::uint64_t token = 0;
    for (int i = 0; i < stream.bits_per_token; ++i) {
      const BitContext ctx{static_cast<std::uint32_t>(i), token, prev_token};
      const std::uint32_t p_one = quantize_probability(
          model.next_bit_probability(ctx));
      const int bit = dec.decode_bit(kProbabilityScale - p_one);
      model.update(ctx, bit);
      token |= static_cast<std::uint64_t>(bit) << i;
    }
    tokens.push_back(token);
    prev_token = token;
  }
  return tokens;
}

double cross_entropy_bits(std::span<const std::uint64_t> tokens,
                          int bits_per_token, ProbabilityModel& model) {
  check_bits_per_token(bits_per_token);
  const double scale = static_cast<double>(kProbabilityScale);
  double bits = 0.0;
  std::uint64_t prev_token = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::uint64_t token = tokens[t];
    std::uint64_t coded = 0;
    for (int i = 0; i < bits_per_token; ++i) {
      const int bit = static_cast<int>((token >> i) & 1);
      const BitContext ctx{static_cast<std::uint32_t>(i), coded, prev_token};
      const std::uint32_t q_one = quantize_probability(
          model.next_bit_probability(ctx));
      const double p = bit ? q_one / scale : (kProbabilityScale - q_one) / scale;
      bits -= std::log2(p);
      model.update(ctx, bit);
      coded |= static_cast<std::uint64_t>(bit) << i;
    }
    prev_token = token;
  }
  return bits;
}

}  // namespace ganc::coder
