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

#include "ganc/tokenizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ganc/bsq.hpp"
#include "ganc/error.hpp"
#include "ganc/rng.hpp"
#include "nn_kernels.hpp"

namespace ganc {
namespace codec {

namespace {

constexpr float kMaskedOut = -std::numeric_limits<float>::infinity();

std::string block_name(const char* stack, int index, const char* leaf) {
  return std::string(stack) + "." + std::to_string(index) + "." + leaf;
}

/// Per-block parameter views resolved against the weights store.
struct BlockParams {
  std::span<const float> ln1_gamma, ln1_beta;
  std::span<const float> wq, bq, wk, bk, wv, bv, wo, bo;
  std::span<const float> ln2_gamma, ln2_beta;
  std::span<const float> fc1_w, fc1_b, fc2_w, fc2_b;
  int hidden = 0;
};

BlockParams resolve_block(const ModelWeights& w, const char* stack, int index,
                          int d, int mlp_ratio) {
  const std::uint32_t du = static_cast<std::uint32_t>(d);
  const std::uint32_t hu = static_cast<std::uint32_t>(d * mlp_ratio);
  const std::uint32_t vec_d[] = {du};
  const std::uint32_t mat_dd[] = {du, du};
  const std::uint32_t vec_h[] = {hu};
  const std::uint32_t mat_hd[] = {hu, du};
  const std::uint32_t mat_dh[] = {du, hu};
  BlockParams p;
  auto span_of = [](const Tensor& t) {
    return std::span<const float>(t.data);
  };
  p.ln1_gamma = span_of(w.get(block_name(stack, index, "ln1.gamma"), vec_d));
  p.ln1_beta = span_of(w.get(block_name(stack, index, "ln1.beta"), vec_d));
  p.wq = span_of(w.get(block_name(stack, index, "attn.q.weight"), mat_dd));
  p.bq = span_of(w.get(block_name(stack, index, "attn.q.bias"), vec_d));
  p.wk = span_of(w.get(block_name(stack, index, "attn.k.weight"), mat_dd));
  p.bk = span_of(w.get(block_name(stack, index, "attn.k.bias"), vec_d));
  p.wv = span_of(w.get(block_name(stack, index, "attn.v.weight"), mat_dd));
  p.bv = span_of(w.get(block_name(stack, index, "attn.v.bias"), vec_d));
  p.wo = span_of(w.get(block_name(stack, index, "attn.out.weight"), mat_dd));
  p.bo = span_of(w.get(block_name(stack, index, "attn.out.bias"), vec_d));
  p.ln2_gamma = span_of(w.get(block_name(stack, index, "ln2.gamma"), vec_d));
  p.ln2_beta = span_of(w.get(block_name(stack, index, "ln2.beta"), vec_d));
  p.fc1_w = span_of(w.get(block_name(stack, index, "mlp.fc1.weight"), mat_hd));
  p.fc1_b = span_of(w.get(block_name(stack, index, "mlp.fc1.bias"), vec_h));
  p.fc2_w = span_of(w.get(block_name(stack, index, "mlp.fc2.weight"), mat_dh));
  p.fc2_b = span_of(w.get(block_name(stack, index, "mlp.fc2.bias"), vec_d));
  p.hidden = d * mlp_ratio;
  return p;
}

/// Multi-head attention over x [n, d] under the mask: slices heads out of
/// the joint q/k/v projections, runs each through masked_attention, and
/// applies the output projection.
std::vector<float> self_attention(std::span<const float> x, int n, int d,
                                  int heads, const BlockParams& p,
                                  const AttentionMask& mask) {
  const std::vector<float> q = detail::linear_forward(x, n, d, p.wq, p.bq, d);
  const std::vector<float> k = detail::linear_forward(x, n, d, p.wk, p.bk, d);
  const std::vector<float> v = detail::linear_forward(x, n, d, p.wv, p.bv, d);
  const int d_head = d / heads;
  std::vector<float> concat(static_cast<std::size_t>(n) * d);
  std::vector<float> qh(static_cast<std::size_t>(n) * d_head);
  std::vector<float> kh(qh.size()), vh(qh.size());
  for (int h = 0; h < heads; ++h) {
    const int off = h * d_head;
    for (int i = 0; i < n; ++i) {
      const std::size_t src = static_cast<std::size_t>(i) * d + off;
      const std::size_t dst = static_cast<std::size_t>(i) * d_head;
      for (int c = 0; c < d_head; ++c) {
        qh[dst + c] = q[src + c];
        kh[dst + c] = k[src + c];
        vh[dst + c] = v[src + c];
      }
    }
    const std::vector<float> oh =
        masked_attention(qh, kh, vh, n, d_head, mask);
    for (int i = 0; i < n; ++i) {
      const std::size_t src = static_cast<std::size_t>(i) * d_head;
      const std::size_t dst = static_cast<std::size_t>(i) * d + off;
      for (int c = 0; c < d_head; ++c) concat[dst + c] = oh[src + c];
    }
  }
  return detail::linear_forward(concat, n, d, p.wo, p.bo, d);
}

/// Pre-layer-norm transformer block:
///   x += attn(ln1(x)); x += fc2(gelu(fc1(ln2(x)))).
void transformer_block(std::vector<float>& x, int n, int d, int heads,
                       const BlockParams& p, const AttentionMask& mask) {
  {
    const std::vector<float> normed =
        detail::layer_norm(x, n, d, p.ln1_gamma, p.ln1_beta);
    const std::vector<float> attn =
        self_attention(normed, n, d, heads, p, mask);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += attn[i];
  }
  {
    const std::vector<float> normed =
        detail::layer_norm(x, n, d, p.ln2_gamma, p.ln2_beta);
    std::vector<float> hidden =
        detail::linear_forward(normed, n, d, p.fc1_w, p.fc1_b, p.hidden);
    detail::gelu_inplace(hidden);
    const std::vector<float> out =
        detail::linear_forward(hidden, n, p.hidden, p.fc2_w, p.fc2_b, d);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += out[i];
  }
}

/// Positional table for one frame's grid: the learned "pos_embed" tensor
/// when stored, the sinusoidal fallback otherwise.
std::vector<float> positional_table(const ModelWeights& w, int rows, int cols,
                                    int d) {
  if (w.has("pos_embed")) {
    const std::uint32_t expected[] = {
        static_cast<std::uint32_t>(rows) * static_cast<std::uint32_t>(cols),
        static_cast<std::uint32_t>(d)};
    return w.get("pos_embed", expected).data;
  }
  return sinusoidal_pos_embed(rows, cols, d);
}

bsq::ProjectionWeights resolve_projection(const ModelWeights& w, int d,
                                          int bits) {
  const std::uint32_t down_dims[] = {static_cast<std::uint32_t>(bits),
                                     static_cast<std::uint32_t>(d)};
  const std::uint32_t up_dims[] = {static_cast<std::uint32_t>(d),
                                   static_cast<std::uint32_t>(bits)};
  bsq::ProjectionWeights pw;
  pw.latent_dim = d;
  pw.code_dim = bits;
  pw.down = w.get("bsq.down", down_dims).data;
  pw.up = w.get("bsq.up", up_dims).data;
  return pw;
}

void check_consistency(const ModelWeights& w, const TokenizerConfig& cfg) {
  cfg.validate();
  const std::uint32_t embed_dims[] = {
      static_cast<std::uint32_t>(cfg.latent_dim),
      static_cast<std::uint32_t>(3 * cfg.patch * cfg.patch)};
  w.get("patch_embed.weight", embed_dims);
}

/// Encoder trunk shared by single images and sequences: embeds every
/// frame's patches, adds per-frame positional embeddings, and runs the
/// stacked blocks over the concatenated sequence under the mask.
std::vector<float> encode_latents(std::span<const Image> frames,
                                  const ModelWeights& w,
                                  const TokenizerConfig& cfg, int rows,
                                  int cols, const AttentionMask& mask) {
  const int d = cfg.latent_dim;
  const int per_frame = rows * cols;
  const int total = per_frame * static_cast<int>(frames.size());
  const std::uint32_t embed_w_dims[] = {
      static_cast<std::uint32_t>(d),
      static_cast<std::uint32_t>(3 * cfg.patch * cfg.patch)};
  const std::uint32_t embed_b_dims[] = {static_cast<std::uint32_t>(d)};
  const Tensor& embed_w = w.get("patch_embed.weight", embed_w_dims);
  const Tensor& embed_b = w.get("patch_embed.bias", embed_b_dims);
  const std::vector<float> pos = positional_table(w, rows, cols, d);

  std::vector<float> x(static_cast<std::size_t>(total) * d);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const PatchGrid patches = patchify(frames[f], cfg.patch);
    std::vector<float> embedded = detail::linear_forward(
        patches.patches, per_frame, patches.patch_dim(), embed_w.data,
        embed_b.data, d);
    float* dst = x.data() + f * static_cast<std::size_t>(per_frame) * d;
    for (std::size_t i = 0; i < embedded.size(); ++i) {
      dst[i] = embedded[i] + pos[i];
    }
  }

  for (int b = 0; b < cfg.depth; ++b) {
    const BlockParams p = resolve_block(w, "enc", b, d, cfg.mlp_ratio);
    transformer_block(x, total, d, cfg.heads, p, mask);
  }
  return x;
}

}  // namespace

void TokenizerConfig::validate() const {
  if (patch < 1) {
    raise(ErrorKind::kBadArgument,
          "config: patch must be >= 1, got " + std::to_string(patch));
  }
  if (codebook_bits < 1 || codebook_bits > 64) {
    raise(ErrorKind::kBadArgument, "config: codebook bits must be in [1, 64]");
  }
  if (latent_dim < 1 || depth < 0 || heads < 1 || mlp_ratio < 1 ||
      enhance_hidden < 1) {
    raise(ErrorKind::kBadArgument, "config: dimensions must be positive");
  }
  if (latent_dim % heads != 0) {
    raise(ErrorKind::kBadArgument,
          "config: latent dim " + std::to_string(latent_dim) +
              " not divisible by heads " + std::to_string(heads));
  }
  if (!std::isfinite(skip_weight)) {
    raise(ErrorKind::kBadArgument, "config: skip weight must be finite");
  }
}

PatchGrid patchify(const Image& img, int patch) {
  if (patch < 1) {
    raise(ErrorKind::kBadArgument, "patchify: patch must be >= 1");
  }
  if (img.height() % patch != 0 || img.width() % patch != 0) {
    raise(ErrorKind::kShape,
          "patchify: " + std::to_string(img.height()) + "x" +
              std::to_string(img.width()) + " not divisible by patch " +
              std::to_string(patch));
  }
  PatchGrid g;
  g.rows = img.height() / patch;
  g.cols = img.width() / patch;
  g.patch = patch;
  g.patches.resize(static_cast<std::size_t>(g.count()) * g.patch_dim());
  std::size_t out = 0;
  for (int gr = 0; gr < g.rows; ++gr) {
    for (int gc = 0; gc < g.cols; ++gc) {
      for (int py = 0; py < patch; ++py) {
        for (int px = 0; px < patch; ++px) {
          for (int c = 0; c < 3; ++c) {
            g.patches[out++] = img.at(gr * patch + py, gc * patch + px, c);
          }
        }
      }
    }
  }
  return g;
}

Image unpatchify(const PatchGrid& grid, int height, int width) {
  if (grid.patch < 1 || grid.rows < 1 || grid.cols < 1 ||
      grid.patches.size() !=
          static_cast<std::size_t>(grid.count()) * grid.patch_dim()) {
    raise(ErrorKind::kShape, "unpatchify: malformed patch grid");
  }
  if (height != grid.rows * grid.patch || width != grid.cols * grid.patch) {
    raise(ErrorKind::kShape,
          "unpatchify: " + std::to_string(height) + "x" +
              std::to_string(width) + " inconsistent with " +
              std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
              " patches of size " + std::to_string(grid.patch));
  }
  Image img(height, width);
  std::size_t in = 0;
  for (int gr = 0; gr < grid.rows; ++gr) {
    for (int gc = 0; gc < grid.cols; ++gc) {
      for (int py = 0; py < grid.patch; ++py) {
        for (int px = 0; px < grid.patch; ++px) {
          for (int c = 0; c < 3; ++c) {
            img.set(gr * grid.patch + py, gc * grid.patch + px, c,
                    grid.patches[in++]);
          }
        }
      }
    }
  }
  return img;
}

AttentionMask build_block_causal_mask(int frames, int tokens_per_frame) {
  if (frames < 1 || tokens_per_frame < 1) {
    raise(ErrorKind::kBadArgument,
          "build_block_causal_mask: counts must be >= 1");
  }
  AttentionMask mask;
  mask.n = frames * tokens_per_frame;
  mask.m.assign(static_cast<std::size_t>(mask.n) * mask.n, 0.0f);
  for (int i = 0; i < mask.n; ++i) {
    const int frame_i = i / tokens_per_frame;
    for (int j = 0; j < mask.n; ++j) {
      const int frame_j = j / tokens_per_frame;
      if (frame_j > frame_i) {
        mask.m[static_cast<std::size_t>(i) * mask.n + j] = kMaskedOut;
      }
    }
  }
  return mask;
}

std::vector<float> masked_attention(std::span<const float> q,
                                    std::span<const float> k,
                                    std::span<const float> v, int n,
                                    int d_head, const AttentionMask& mask) {
  const std::size_t expected = static_cast<std::size_t>(n) * d_head;
  if (n < 1 || d_head < 1 || q.size() != expected || k.size() != expected ||
      v.size() != expected || mask.n != n ||
      mask.m.size() != static_cast<std::size_t>(n) * n) {
    raise(ErrorKind::kShape, "masked_attention: inconsistent shapes");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head));
  std::vector<float> out(expected);
  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    const float* qi = q.data() + static_cast<std::size_t>(i) * d_head;
    double max_score = -std::numeric_limits<double>::infinity();
    bool any_open = false;
    for (int j = 0; j < n; ++j) {
      if (mask.at(i, j) == kMaskedOut) {
        scores[j] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const float* kj = k.data() + static_cast<std::size_t>(j) * d_head;
      double dot = 0.0;
      for (int c = 0; c < d_head; ++c) {
        dot += static_cast<double>(qi[c]) * static_cast<double>(kj[c]);
      }
      scores[j] = dot * scale + static_cast<double>(mask.at(i, j));
      if (scores[j] > max_score) max_score = scores[j];
      any_open = true;
    }
    if (!any_open) {
      raise(ErrorKind::kDomain,
            "masked_attention: row " + std::to_string(i) + " is fully masked");
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      if (scores[j] == -std::numeric_limits<double>::infinity()) {
        scores[j] = 0.0;
      } else {
        scores[j] = std::exp(scores[j] - max_score);
        denom += scores[j];
      }
    }
    double* row = scores.data();
    float* oi = out.data() + static_cast<std::size_t>(i) * d_head;
    for (int c = 0; c < d_head; ++c) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        if (row[j] == 0.0) continue;
        acc += row[j] *
               static_cast<double>(v[static_cast<std::size_t>(j) * d_head + c]);
      }
      oi[c] = static_cast<float>(acc / denom);
    }
  }
  return out;
}

std::vector<float> sinusoidal_pos_embed(int rows, int cols, int dim) {
  if (rows < 1 || cols < 1) {
    raise(ErrorKind::kShape, "sinusoidal_pos_embed: grid must be non-empty");
  }
  if (dim < 4 || dim % 4 != 0) {
    raise(ErrorKind::kShape,
          "sinusoidal_pos_embed: dim must be a positive multiple of 4, got " +
              std::to_string(dim));
  }
  const int quarter = dim / 4;
  std::vector<float> pe(static_cast<std::size_t>(rows) * cols * dim);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      float* p = pe.data() + (static_cast<std::size_t>(r) * cols + c) * dim;
      for (int i = 0; i < quarter; ++i) {
        const double omega =
            std::pow(10000.0, -static_cast<double>(i) / quarter);
        p[2 * i] = static_cast<float>(std::sin(r * omega));
        p[2 * i + 1] = static_cast<float>(std::cos(r * omega));
        p[dim / 2 + 2 * i] = static_cast<float>(std::sin(c * omega));
        p[dim / 2 + 2 * i + 1] = static_cast<float>(std::cos(c * omega));
      }
    }
  }
  return pe;
}

ModelWeights generate_weights(const TokenizerConfig& cfg, std::uint32_t seed) {
  cfg.validate();
  DeterministicRng rng(seed);
  ModelWeights w;

  auto xavier = [&rng](std::vector<std::uint32_t> dims, int fan_in,
                       int fan_out) {
    Tensor t;
    t.dims = std::move(dims);
    const float a = static_cast<float>(
        std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out)));
    t.data.resize(t.element_count());
    for (float& v : t.data) v = rng.uniform(-a, a);
    return t;
  };
  auto zeros = [](std::vector<std::uint32_t> dims) {
    Tensor t;
    t.dims = std::move(dims);
    t.data.assign(t.element_count(), 0.0f);
    return t;
  };
  auto ones = [](std::vector<std::uint32_t> dims) {
    Tensor t;
    t.dims = std::move(dims);
    t.data.assign(t.element_count(), 1.0f);
    return t;
  };

  const std::uint32_t d = static_cast<std::uint32_t>(cfg.latent_dim);
  const std::uint32_t pd = static_cast<std::uint32_t>(3 * cfg.patch *
                                                      cfg.patch);
  const std::uint32_t hidden = d * static_cast<std::uint32_t>(cfg.mlp_ratio);
  const std::uint32_t bits = static_cast<std::uint32_t>(cfg.codebook_bits);
  const std::uint32_t eh = static_cast<std::uint32_t>(cfg.enhance_hidden);

  // Creation order is part of the contract: each tensor consumes RNG draws,
  // so reordering changes every later tensor.
  w.put("patch_embed.weight", xavier({d, pd}, static_cast<int>(pd),
                                     static_cast<int>(d)));
  w.put("patch_embed.bias", zeros({d}));
  for (const char* stack : {"enc", "dec"}) {
    for (int b = 0; b < cfg.depth; ++b) {
      w.put(block_name(stack, b, "ln1.gamma"), ones({d}));
      w.put(block_name(stack, b, "ln1.beta"), zeros({d}));
      for (const char* proj : {"attn.q", "attn.k", "attn.v", "attn.out"}) {
        w.put(block_name(stack, b, (std::string(proj) + ".weight").c_str()),
              xavier({d, d}, static_cast<int>(d), static_cast<int>(d)));
        w.put(block_name(stack, b, (std::string(proj) + ".bias").c_str()),
              zeros({d}));
      }
      w.put(block_name(stack, b, "ln2.gamma"), ones({d}));
      w.put(block_name(stack, b, "ln2.beta"), zeros({d}));
      w.put(block_name(stack, b, "mlp.fc1.weight"),
            xavier({hidden, d}, static_cast<int>(d),
                   static_cast<int>(hidden)));
      w.put(block_name(stack, b, "mlp.fc1.bias"), zeros({hidden}));
      w.put(block_name(stack, b, "mlp.fc2.weight"),
            xavier({d, hidden}, static_cast<int>(hidden),
                   static_cast<int>(d)));
      w.put(block_name(stack, b, "mlp.fc2.bias"), zeros({d}));
    }
  }
  w.put("bsq.down", xavier({bits, d}, static_cast<int>(d),
                           static_cast<int>(bits)));
  w.put("bsq.up", xavier({d, bits}, static_cast<int>(bits),
                         static_cast<int>(d)));
  w.put("output_head.weight", xavier({pd, d}, static_cast<int>(d),
                                     static_cast<int>(pd)));
  w.put("output_head.bias", zeros({pd}));
  w.put("enhance.conv1.weight",
        xavier({eh, 3, 3, 3}, 3 * 9, static_cast<int>(eh) * 9));
  w.put("enhance.conv1.bias", zeros({eh}));
  w.put("enhance.conv2.weight",
        xavier({3, eh, 1, 1}, static_cast<int>(eh), 3));
  w.put("enhance.conv2.bias", zeros({3}));
  w.put_scalar("config.heads", static_cast<float>(cfg.heads));
  w.put_scalar("config.skip_weight", cfg.skip_weight);
  return w;
}

TokenizerConfig infer_config(const ModelWeights& w) {
  TokenizerConfig cfg;
  const Tensor& embed = w.get("patch_embed.weight");
  if (embed.dims.size() != 2 || embed.dims[1] % 3 != 0) {
    raise(ErrorKind::kShape, "infer_config: malformed patch embed tensor");
  }
  cfg.latent_dim = static_cast<int>(embed.dims[0]);
  const int patch_sq = static_cast<int>(embed.dims[1]) / 3;
  cfg.patch = static_cast<int>(std::lround(std::sqrt(patch_sq)));
  if (cfg.patch * cfg.patch != patch_sq) {
    raise(ErrorKind::kShape, "infer_config: patch embed is not square");
  }
  int depth = 0;
  while (w.has(block_name("enc", depth, "ln1.gamma"))) ++depth;
  cfg.depth = depth;
  cfg.heads = static_cast<int>(std::lround(w.get_scalar("config.heads")));
  const Tensor& down = w.get("bsq.down");
  if (down.dims.size() != 2 ||
      down.dims[1] != static_cast<std::uint32_t>(cfg.latent_dim)) {
    raise(ErrorKind::kShape, "infer_config: malformed projection tensor");
  }
  cfg.codebook_bits = static_cast<int>(down.dims[0]);
  if (depth > 0) {
    const Tensor& fc1 = w.get(block_name("enc", 0, "mlp.fc1.weight"));
    if (fc1.dims.size() != 2 ||
        fc1.dims[0] % static_cast<std::uint32_t>(cfg.latent_dim) != 0) {
      raise(ErrorKind::kShape, "infer_config: malformed MLP tensor");
    }
    cfg.mlp_ratio = static_cast<int>(fc1.dims[0]) / cfg.latent_dim;
  }
  const Tensor& conv1 = w.get("enhance.conv1.weight");
  if (conv1.dims.size() != 4) {
    raise(ErrorKind::kShape, "infer_config: malformed enhancement tensor");
  }
  cfg.enhance_hidden = static_cast<int>(conv1.dims[0]);
  if (w.has("config.skip_weight")) {
    cfg.skip_weight = w.get_scalar("config.skip_weight");
  }
  cfg.validate();
  return cfg;
}

std::vector<TokenGrid> tokenize_sequence(std::span<const Image> frames,
                                         const ModelWeights& w,
                                         const TokenizerConfig& cfg) {
  if (frames.empty()) {
    raise(ErrorKind::kBadArgument, "tokenize_sequence: no frames");
  }
  check_consistency(w, cfg);
  for (std::size_t f = 1; f < frames.size(); ++f) {
    require_same_shape(frames[0], frames[f]);
  }
  const Image& first = frames[0];
  if (first.height() % cfg.patch != 0 || first.width() % cfg.patch != 0) {
    raise(ErrorKind::kShape,
          "tokenize_sequence: " + std::to_string(first.height()) + "x" +
              std::to_string(first.width()) + " not divisible by patch " +
              std::to_string(cfg.patch));
  }
  const int rows = first.height() / cfg.patch;
  const int cols = first.width() / cfg.patch;
  const int per_frame = rows * cols;
  const AttentionMask mask = build_block_causal_mask(
      static_cast<int>(frames.size()), per_frame);
  const std::vector<float> latents =
      encode_latents(frames, w, cfg, rows, cols, mask);

  const bsq::ProjectionWeights pw =
      resolve_projection(w, cfg.latent_dim, cfg.codebook_bits);
  std::vector<TokenGrid> grids(frames.size());
  std::vector<double> z(cfg.latent_dim);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    TokenGrid& grid = grids[f];
    grid.h = rows;
    grid.w = cols;
    grid.bits = cfg.codebook_bits;
    grid.tokens.resize(static_cast<std::size_t>(per_frame));
    for (int i = 0; i < per_frame; ++i) {
      const float* zi = latents.data() +
                        (f * static_cast<std::size_t>(per_frame) + i) *
                            cfg.latent_dim;
      for (int c = 0; c < cfg.latent_dim; ++c) z[c] = zi[c];
      const std::vector<double> projected = bsq::project(z, pw);
      const std::vector<double> unit = bsq::spherical_normalize(projected);
      const std::vector<double> code = bsq::binary_quantize(unit);
      grid.tokens[static_cast<std::size_t>(i)] = bsq::code_to_token(code);
    }
  }
  return grids;
}

TokenGrid tokenize(const Image& img, const ModelWeights& w,
                   const TokenizerConfig& cfg) {
  return tokenize_sequence(std::span<const Image>(&img, 1), w, cfg)[0];
}

Image detokenize(const TokenGrid& grid, const ModelWeights& w,
                 const TokenizerConfig& cfg) {
  check_consistency(w, cfg);
  grid.validate();
  if (grid.bits != cfg.codebook_bits) {
    raise(ErrorKind::kDomain,
          "detokenize: grid holds " + std::to_string(grid.bits) +
              "-bit tokens, config expects " +
              std::to_string(cfg.codebook_bits));
  }
  const int d = cfg.latent_dim;
  const int n = grid.h * grid.w;
  const bsq::ProjectionWeights pw = resolve_projection(w, d, cfg.codebook_bits);
  const std::vector<float> pos = positional_table(w, grid.h, grid.w, d);

  std::vector<float> x(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> code =
        bsq::token_to_code(grid.tokens[static_cast<std::size_t>(i)],
                           cfg.codebook_bits);
    const std::vector<double> latent = bsq::back_project(code, pw);
    float* xi = x.data() + static_cast<std::size_t>(i) * d;
    for (int c = 0; c < d; ++c) {
      xi[c] = static_cast<float>(latent[static_cast<std::size_t>(c)]) +
              pos[static_cast<std::size_t>(i) * d + c];
    }
  }

  const AttentionMask mask = build_block_causal_mask(1, n);
  for (int b = 0; b < cfg.depth; ++b) {
    const BlockParams p = resolve_block(w, "dec", b, d, cfg.mlp_ratio);
    transformer_block(x, n, d, cfg.heads, p, mask);
  }

  const int pd = 3 * cfg.patch * cfg.patch;
  const std::uint32_t head_w_dims[] = {static_cast<std::uint32_t>(pd),
                                       static_cast<std::uint32_t>(d)};
  const std::uint32_t head_b_dims[] = {static_cast<std::uint32_t>(pd)};
  const Tensor& head_w = w.get("output_head.weight", head_w_dims);
  const Tensor& head_b = w.get("output_head.bias", head_b_dims);
  const std::vector<float> patches =
      detail::linear_forward(x, n, d, head_w.data, head_b.data, pd);

  // Base image kept unclamped: the enhancement head sees raw values and the
  // final construction clamps base + skip * enhance(base).
  const int height = grid.h * cfg.patch;
  const int width = grid.w * cfg.patch;
  std::vector<float> base(static_cast<std::size_t>(height) * width * 3);
  {
    std::size_t in = 0;
    for (int gr = 0; gr < grid.h; ++gr) {
      for (int gc = 0; gc < grid.w; ++gc) {
        for (int py = 0; py < cfg.patch; ++py) {
          for (int px = 0; px < cfg.patch; ++px) {
            for (int c = 0; c < 3; ++c) {
              base[(static_cast<std::size_t>(gr * cfg.patch + py) * width +
                    (gc * cfg.patch + px)) *
                       3 +
                   c] = patches[in++];
            }
          }
        }
      }
    }
  }

  // Enhancement head on planar channels: 3x3 conv, GELU, 1x1 conv.
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  std::vector<float> planar(plane * 3);
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) planar[c * plane + i] = base[i * 3 + c];
  }
  const std::uint32_t eh = static_cast<std::uint32_t>(cfg.enhance_hidden);
  const std::uint32_t conv1_w_dims[] = {eh, 3, 3, 3};
  const std::uint32_t conv1_b_dims[] = {eh};
  const std::uint32_t conv2_w_dims[] = {3, eh, 1, 1};
  const std::uint32_t conv2_b_dims[] = {3};
  std::vector<float> hidden = detail::conv2d_same(
      planar, 3, height, width,
      w.get("enhance.conv1.weight", conv1_w_dims).data,
      w.get("enhance.conv1.bias", conv1_b_dims).data, cfg.enhance_hidden, 3);
  detail::gelu_inplace(hidden);
  const std::vector<float> enhanced = detail::conv2d_same(
      hidden, cfg.enhance_hidden, height, width,
      w.get("enhance.conv2.weight", conv2_w_dims).data,
      w.get("enhance.conv2.bias", conv2_b_dims).data, 3, 1);

  Image out(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x2 = 0; x2 < width; ++x2) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x2;
      for (int c = 0; c < 3; ++c) {
        out.set(y, x2, c,
                base[i * 3 + c] +
                    cfg.skip_weight * enhanced[c * plane + i]);
      }
    }
  }
  return out;
}

}  // namespace codec
}  // namespace ganc
