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

#ifndef GANC_FREQ_HPP_
#define GANC_FREQ_HPP_

// Frequency-domain enhancement blocks: 8x8 orthonormal block DCT, learned
// per-coefficient scaling with a mid-frequency Gaussian initialization, a
// sigmoid channel-mixing gate, and the global adaptive contrast gate.

#include <span>
#include <vector>

#include "ganc/weights.hpp"

namespace ganc {
namespace freq {

inline constexpr int kBlockSize = 8;

/// Per-channel 8x8 coefficient and spatial scales plus the 1x1 channel
/// mixing that drives the attention gate.
struct FreqScales {
  int channels = 0;
  std::vector<float> dct_scale;    // [C, 8, 8]
  std::vector<float> idct_scale;   // [C, 8, 8]
  std::vector<float> attn_weight;  // [C, C]
  std::vector<float> attn_bias;    // [C]

  void validate() const;
};

/// Mid-frequency Gaussian initialization:
///   dct_scale[c, i, j] = exp(-((sqrt(i^2 + j^2) - 3)^2) / 8)
/// so the dist = 3 ring carries weight 1 and the DC bin exp(-9/8).
/// idct_scale starts at ones, the gate mixing at zero (gate 0.5).
FreqScales init_freq_weights(int channels);

/// Orthonormal type-II DCT of one 8x8 block (row-major, 64 values).
void dct8x8_forward(std::span<const double> block, std::span<double> out);

/// Orthonormal type-III DCT, exact inverse of dct8x8_forward.
void dct8x8_inverse(std::span<const double> block, std::span<double> out);

/// Per-block transform of a planar [C, H, W] map: symmetric-reflect pad to
/// multiples of 8, DCT, scale coefficients, inverse DCT, scale spatially,
/// then gate with sigmoid(1x1 mix) and crop back to H x W.
std::vector<float> frequency_attention_forward(std::span<const float> x,
                                               int channels, int height,
                                               int width,
                                               const FreqScales& scales);

struct ContrastParams {
  int channels = 0;
  int hidden = 0;
  std::vector<float> fc1_weight;  // [hidden, C]
  std::vector<float> fc1_bias;    // [hidden]
  std::vector<float> fc2_weight;  // [C, hidden]
  std::vector<float> fc2_bias;    // [C]

  void validate() const;
};

/// Global contrast gate: per-channel means -> fc1 -> LeakyReLU(0.2) -> fc2
/// -> sigmoid = g, output = x * 2g per channel. Zero parameters give
/// g = 0.5, the exact identity.
std::vector<float> adaptive_contrast_forward(std::span<const float> x,
                                             int channels, int height,
                                             int width,
                                             const ContrastParams& params);

/// Loads the reserved tensor names "freq.dct_scale", "freq.idct_scale",
/// "freq.attn.weight", "freq.attn.bias" from a weights store.
FreqScales load_freq_scales(const ModelWeights& w, int channels);

/// Loads "contrast.fc1.weight/bias" and "contrast.fc2.weight/bias".
ContrastParams load_contrast_params(const ModelWeights& w, int channels);

}  // namespace freq
}  // namespace ganc

#endif  // GANC_FREQ_HPP_
