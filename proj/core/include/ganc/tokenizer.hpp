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

#ifndef GANC_TOKENIZER_HPP_
#define GANC_TOKENIZER_HPP_

// Patch tokenizer: images are cut into non-overlapping p x p patches,
// embedded, run through a pre-layer-norm transformer encoder, projected to a
// binary spherical code, and mapped to integer tokens. Decoding mirrors the
// pipeline and finishes with an enhancement head blended through a fixed
// skip weight. Multi-frame sequences attend under a block-causal mask so a
// frame's tokens never depend on later frames.

#include <cstdint>
#include <span>
#include <vector>

#include "ganc/image.hpp"
#include "ganc/token_grid.hpp"
#include "ganc/weights.hpp"

namespace ganc {
namespace codec {

struct TokenizerConfig {
  int patch = 8;
  int codebook_bits = 16;
  int latent_dim = 256;
  int depth = 4;
  int heads = 4;
  int mlp_ratio = 4;
  int enhance_hidden = 16;
  float skip_weight = 0.15f;

  void validate() const;
};

/// Non-overlapping patches in grid row-major order; each patch flattens as
/// (row, col, channel), giving 3*p*p values.
struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int patch = 0;
  std::vector<float> patches;  // [rows*cols, 3*patch*patch]

  int patch_dim() const { return 3 * patch * patch; }
  int count() const { return rows * cols; }
};

PatchGrid patchify(const Image& img, int patch);

/// Exact inverse of patchify. height/width must equal rows*p and cols*p.
Image unpatchify(const PatchGrid& grid, int height, int width);

/// Additive attention mask with entries 0 (attend) or -infinity (blocked).
struct AttentionMask {
  int n = 0;
  std::vector<float> m;  // [n, n]

  float at(int i, int j) const {
    return m[static_cast<std::size_t>(i) * n + j];
  }
};

/// Token i may attend token j iff frame(j) <= frame(i); within a frame
/// everything attends everything. A single frame yields an all-zero mask.
AttentionMask build_block_causal_mask(int frames, int tokens_per_frame);

/// softmax(Q K^T / sqrt(d_head) + M) V over rows. A row whose mask entries
/// are all -infinity raises a domain error.
std::vector<float> masked_attention(std::span<const float> q,
                                    std::span<const float> k,
                                    std::span<const float> v, int n,
                                    int d_head, const AttentionMask& mask);

/// Deterministic 2D sinusoidal positional table [rows*cols, dim]; the
/// fallback used when no learned table is stored. dim must be divisible
/// by 4 (sin/cos pairs for row and column).
std::vector<float> sinusoidal_pos_embed(int rows, int cols, int dim);

/// Fresh weights for the config: Xavier-uniform matrices from a fixed seed,
/// zero biases, identity layer norms. Tensor creation order is fixed, so a
/// given (cfg, seed) always yields the same bytes. No positional table is
/// stored; the sinusoidal fallback applies.
ModelWeights generate_weights(const TokenizerConfig& cfg, std::uint32_t seed);

/// Reconstructs the config a weights file was built for.
TokenizerConfig infer_config(const ModelWeights& w);

TokenGrid tokenize(const Image& img, const ModelWeights& w,
                   const TokenizerConfig& cfg);

Image detokenize(const TokenGrid& grid, const ModelWeights& w,
                 const TokenizerConfig& cfg);

/// Joint encoding of an ordered frame sequence under the block-causal mask.
/// Output t depends only on frames 0..t. A single frame equals tokenize.
std::vector<TokenGrid> tokenize_sequence(std::span<const Image> frames,
                                         const ModelWeights& w,
                                         const TokenizerConfig& cfg);

}  // namespace codec
}  // namespace ganc

#endif  // GANC_TOKENIZER_HPP_
