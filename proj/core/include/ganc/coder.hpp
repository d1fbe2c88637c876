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

#ifndef GANC_CODER_HPP_
#define GANC_CODER_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace ganc::coder {

// Adaptive arithmetic coding of token streams. Tokens are decomposed into
// bits (little-endian, matching the BSQ token bijection) and coded one
// binary decision at a time through a carry-propagating range coder, so the
// chain-rule factorization survives at bit granularity even for codebooks
// far too large to enumerate. The interval state is integer-only; the same
// input bytes decode identically on every platform.

/// Probability precision: probabilities live on a 1/4096 grid and are
/// clamped to [1, 4095] so no symbol is ever impossible.
inline constexpr std::uint32_t kProbabilityBits = 12;
inline constexpr std::uint32_t kProbabilityScale = 1u << kProbabilityBits;

/// Raw ingredients of a bit's coding context. `current_bits` holds the
/// already-coded low bits [0, bit_pos) of the current token; `prev_token`
/// is 0 for the first token of the stream.
struct BitContext {
  std::uint32_t bit_pos = 0;
  std::uint64_t current_bits = 0;
  std::uint64_t prev_token = 0;
};

/// Conditional bit-probability model. Encode and decode must drive an
/// identically constructed, freshly reset model through the same
/// observation sequence; the coder guarantees the call order matches.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;

  /// P(bit == 1 | context), in (0, 1).
  virtual double next_bit_probability(const BitContext& ctx) const = 0;

  virtual void update(const BitContext& ctx, int bit) = 0;

  /// Restores the freshly-constructed state.
  virtual void reset() = 0;

  /// Identification stored in the coded stream header.
  virtual std::uint8_t model_id() const = 0;
  virtual std::uint16_t model_params() const = 0;
};

/// Model id 0: fixed p = 1/2 for every bit. Codes any stream at ~1 bit/bit.
class StaticUniformModel final : public ProbabilityModel {
 public:
  double next_bit_probability(const BitContext&) const override { return 0.5; }
  void update(const BitContext&, int) override {}
  void reset() override {}
  std::uint8_t model_id() const override { return 0; }
  std::uint16_t model_params() const override { return 0; }
};

/// Model id 1: counting model with Laplace(+1) smoothing over the context
/// (bit position, previous `order` bits of the current token, same-position
/// bit of the previous token). order must be 0, 1 or 2.
class AdaptiveBitModel final : public ProbabilityModel {
 public:
  AdaptiveBitModel(int order, int bits_per_token);

  double next_bit_probability(const BitContext& ctx) const override;
  void update(const BitContext& ctx, int bit) override;
  void reset() override;
  std::uint8_t model_id() const override { return 1; }
  std::uint16_t model_params() const override {
    return static_cast<std::uint16_t>(order_);
  }

 private:
  std::size_t context_index(const BitContext& ctx) const;

  int order_;
  int bits_per_token_;
  std::vector<std::uint32_t> counts_;  // pairs (zeros, ones) per context
};

/// Builds the model a stream header describes.
std::unique_ptr<ProbabilityModel> make_model(std::uint8_t model_id,
                                             std::uint16_t model_params,
                                             int bits_per_token);

/// Coded token stream. Byte layout (all little-endian):
///   n_tokens u32 | bits_per_token u8 | model_id u8 | model_params u16 |
///   coded bytes.
struct CodedStream {
  std::uint32_t n_tokens = 0;
  std::uint8_t bits_per_token = 0;
  std::uint8_t model_id = 0;
  std::uint16_t model_params = 0;
  std::vector<std::uint8_t> payload;

  std::vector<std::uint8_t> to_bytes() const;
  static CodedStream from_bytes(std::span<const std::uint8_t> bytes);
};

/// Quantizes P(bit == 1) onto the 12-bit grid, clamped to [1, 4095].
std::uint32_t quantize_probability(double p_one);

/// Codes `tokens` (each < 2^bits_per_token) as bits_per_token binary
/// decisions each. The model must be freshly reset.
CodedStream ac_encode(std::span<const std::uint64_t> tokens,
                      int bits_per_token, ProbabilityModel& model);

/// Exact inverse of ac_encode given an identically reset model. Truncated
/// payloads raise a truncation error; a header/model mismatch is a format
/// error.
std::vector<std::uint64_t> ac_decode(const CodedStream& stream,
                                     ProbabilityModel& model);

/// Ideal code length in bits under the model's (quantized) probabilities:
/// sum of -log2 p(observed bit). The model must be freshly reset.
double cross_entropy_bits(std::span<const std::uint64_t> tokens,
                          int bits_per_token, ProbabilityModel& model);

}  // namespace ganc::coder

#endif  // GANC_CODER_HPP_
