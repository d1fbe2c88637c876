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

#include "ganc/freq.hpp"

#include <cmath>
#include <cstddef>

#include "ganc/error.hpp"
#include "nn_kernels.hpp"

namespace ganc {
namespace freq {

namespace {

constexpr int kB = kBlockSize;
constexpr std::size_t kBlockArea = static_cast<std::size_t>(kB) * kB;

/// Orthonormal DCT-II basis: cos[k][n] = s(k) * cos(pi (2n+1) k / 16) with
/// s(0) = sqrt(1/8), s(k>0) = sqrt(2/8). Built once; both directions reuse
/// the same matrix (DCT-III is its transpose).
struct DctBasis {
  double m[kB][kB];

  DctBasis() {
    const double pi = std::acos(-1.0);
    for (int k = 0; k < kB; ++k) {
      const double s = k == 0 ? std::sqrt(1.0 / kB) : std::sqrt(2.0 / kB);
      for (int n = 0; n < kB; ++n) {
        m[k][n] = s * std::cos(pi * (2 * n + 1) * k / (2.0 * kB));
      }
    }
  }
};

const DctBasis& basis() {
  static const DctBasis b;
  return b;
}

void check_block(std::span<const double> block, std::span<double> out) {
  if (block.size() != kBlockArea || out.size() != kBlockArea) {
    raise(ErrorKind::kShape, "dct8x8: blocks are 64 values");
  }
}

/// Symmetric reflection of index i into [0, n): tiles with period 2n so any
/// pad amount is valid, including n = 1.
int mirror_index(int i, int n) {
  const int period = 2 * n;
  int idx = i % period;
  if (idx < 0) idx += period;
  return idx < n ? idx : period - 1 - idx;
}

void check_map(std::span<const float> x, int channels, int height,
               int width) {
  if (channels < 1 || height < 1 || width < 1 ||
      x.size() != static_cast<std::size_t>(channels) * height * width) {
    raise(ErrorKind::kShape, "feature map shape mismatch");
  }
}

}  // namespace

void FreqScales::validate() const {
  const std::size_t c = static_cast<std::size_t>(channels);
  if (channels < 1 || dct_scale.size() != c * kBlockArea ||
      idct_scale.size() != c * kBlockArea || attn_weight.size() != c * c ||
      attn_bias.size() != c) {
    raise(ErrorKind::kShape, "freq scales shapes do not match channel count");
  }
}

FreqScales init_freq_weights(int channels) {
  if (channels < 1) {
    raise(ErrorKind::kBadArgument, "init_freq_weights: channels must be >= 1");
  }
  FreqScales s;
  s.channels = channels;
  s.dct_scale.resize(static_cast<std::size_t>(channels) * kBlockArea);
  for (int i = 0; i < kB; ++i) {
    for (int j = 0; j < kB; ++j) {
      const double dist = std::sqrt(static_cast<double>(i * i + j * j));
      const double w = std::exp(-((dist - 3.0) * (dist - 3.0)) / 8.0);
      for (int c = 0; c < channels; ++c) {
        s.dct_scale[static_cast<std::size_t>(c) * kBlockArea + i * kB + j] =
            static_cast<float>(w);
      }
    }
  }
  s.idct_scale.assign(static_cast<std::size_t>(channels) * kBlockArea, 1.0f);
  s.attn_weight.assign(static_cast<std::size_t>(channels) * channels, 0.0f);
  s.attn_bias.assign(static_cast<std::size_t>(channels), 0.0f);
  return s;
}

void dct8x8_forward(std::span<const double> block, std::span<double> out) {
  check_block(block, out);
  const DctBasis& b = basis();
  double rows[kB][kB];
  for (int y = 0; y < kB; ++y) {
    for (int k = 0; k < kB; ++k) {
      double acc = 0.0;
      for (int n = 0; n < kB; ++n) acc += b.m[k][n] * block[y * kB + n];
      rows[y][k] = acc;
    }
  }
  for (int k = 0; k < kB; ++k) {
    for (int x = 0; x < kB; ++x) {
      double acc = 0.0;
      for (int n = 0; n < kB; ++n) acc += b.m[k][n] * rows[n][x];
      out[k * kB + x] = acc;
    }
  }
}

void dct8x8_inverse(std::span<const double> block, std::span<double> out) {
  check_block(block, out);
  const DctBasis& b = basis();
  double rows[kB][kB];
  for (int y = 0; y < kB; ++y) {
    for (int n = 0; n < kB; ++n) {
      double acc = 0.0;
      for (int k = 0; k < kB; ++k) acc += b.m[k][n] * block[y * kB + k];
      rows[y][n] = acc;
    }
  }
  for (int n = 0; n < kB; ++n) {
    for (int x = 0; x < kB; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kB; ++k) acc += b.m[k][n] * rows[k][x];
      out[n * kB + x] = acc;
    }
  }
}

std::vector<float> frequency_attention_forward(std::span<const float> x,
                                               int channels, int height,
                                               int width,
                                               const FreqScales& scales) {
  check_map(x, channels, height, width);
  scales.validate();
  if (scales.channels != channels) {
    raise(ErrorKind::kShape,
          "frequency_attention_forward: scales built for " +
              std::to_string(scales.channels) + " channels, input has " +
              std::to_string(channels));
  }
  const int ph = (height + kB - 1) / kB * kB;
  const int pw = (width + kB - 1) / kB * kB;
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  // Transformed features before the gate, cropped back to H x W.
  std::vector<float> transformed(static_cast<std::size_t>(channels) * plane);
  double block[kBlockArea];
  double coeffs[kBlockArea];
  for (int c = 0; c < channels; ++c) {
    const float* src = x.data() + static_cast<std::size_t>(c) * plane;
    const float* cscale =
        scales.dct_scale.data() + static_cast<std::size_t>(c) * kBlockArea;
    const float* sscale =
        scales.idct_scale.data() + static_cast<std::size_t>(c) * kBlockArea;
    for (int by = 0; by < ph; by += kB) {
      for (int bx = 0; bx < pw; bx += kB) {
        for (int u = 0; u < kB; ++u) {
          const int sy = mirror_index(by + u, height);
          for (int v = 0; v < kB; ++v) {
            const int sx = mirror_index(bx + v, width);
            block[u * kB + v] = src[static_cast<std::size_t>(sy) * width + sx];
          }
        }
        dct8x8_forward(block, coeffs);
        for (std::size_t i = 0; i < kBlockArea; ++i) {
          coeffs[i] *= static_cast<double>(cscale[i]);
        }
        dct8x8_inverse(coeffs, block);
        for (int u = 0; u < kB; ++u) {
          const int oy = by + u;
          if (oy >= height) continue;
          for (int v = 0; v < kB; ++v) {
            const int ox = bx + v;
            if (ox >= width) continue;
            transformed[static_cast<std::size_t>(c) * plane + oy * width + ox] =
                static_cast<float>(block[u * kB + v] *
                                   static_cast<double>(sscale[u * kB + v]));
          }
        }
      }
    }
  }

  // Gate: per pixel, sigmoid over a 1x1 channel mix of the transform.
  std::vector<float> out(transformed.size());
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < channels; ++c) {
      double mix = static_cast<double>(scales.attn_bias[c]);
      for (int k = 0; k < channels; ++k) {
        mix += static_cast<double>(
                   scales.attn_weight[static_cast<std::size_t>(c) * channels +
                                      k]) *
               static_cast<double>(transformed[static_cast<std::size_t>(k) *
                                                   plane +
                                               i]);
      }
      const std::size_t idx = static_cast<std::size_t>(c) * plane + i;
      out[idx] = static_cast<float>(static_cast<double>(transformed[idx]) *
                                    detail::sigmoid(mix));
    }
  }
  return out;
}

void ContrastParams::validate() const {
  const std::size_t c = static_cast<std::size_t>(channels);
  const std::size_t h = static_cast<std::size_t>(hidden);
  if (channels < 1 || hidden < 1 || fc1_weight.size() != h * c ||
      fc1_bias.size() != h || fc2_weight.size() != c * h ||
      fc2_bias.size() != c) {
    raise(ErrorKind::kShape, "contrast params shapes are inconsistent");
  }
}

std::vector<float> adaptive_contrast_forward(std::span<const float> x,
                                             int channels, int height,
                                             int width,
                                             const ContrastParams& params) {
  check_map(x, channels, height, width);
  params.validate();
  if (params.channels != channels) {
    raise(ErrorKind::kShape,
          "adaptive_contrast_forward: params built for " +
              std::to_string(params.channels) + " channels, input has " +
              std::to_string(channels));
  }
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  std::vector<double> means(channels, 0.0);
  for (int c = 0; c < channels; ++c) {
    const float* src = x.data() + static_cast<std::size_t>(c) * plane;
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) acc += src[i];
    means[c] = acc / static_cast<double>(plane);
  }

  std::vector<double> hidden(params.hidden);
  for (int h = 0; h < params.hidden; ++h) {
    double acc = static_cast<double>(params.fc1_bias[h]);
    for (int c = 0; c < channels; ++c) {
      acc += static_cast<double>(
                 params.fc1_weight[static_cast<std::size_t>(h) * channels +
                                   c]) *
             means[c];
    }
    hidden[h] = acc >= 0.0 ? acc : 0.2 * acc;
  }

  std::vector<float> out(x.size());
  for (int c = 0; c < channels; ++c) {
    double acc = static_cast<double>(params.fc2_bias[c]);
    for (int h = 0; h < params.hidden; ++h) {
      acc += static_cast<double>(
                 params.fc2_weight[static_cast<std::size_t>(c) * params.hidden +
                                   h]) *
             hidden[h];
    }
    const double gate = 2.0 * detail::sigmoid(acc);
    const float* src = x.data() + static_cast<std::size_t>(c) * plane;
    float* dst = out.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      dst[i] = static_cast<float>(static_cast<double>(src[i]) * gate);
    }
  }
  return out;
}

FreqScales load_freq_scales(const ModelWeights& w, int channels) {
  if (channels < 1) {
    raise(ErrorKind::kBadArgument, "load_freq_scales: channels must be >= 1");
  }
  const std::uint32_t cu = static_cast<std::uint32_t>(channels);
  const std::uint32_t scale_dims[] = {cu, 8, 8};
  const std::uint32_t mix_dims[] = {cu, cu};
  const std::uint32_t bias_dims[] = {cu};
  FreqScales s;
  s.channels = channels;
  s.dct_scale = w.get("freq.dct_scale", scale_dims).data;
  s.idct_scale = w.get("freq.idct_scale", scale_dims).data;
  s.attn_weight = w.get("freq.attn.weight", mix_dims).data;
  s.attn_bias = w.get("freq.attn.bias", bias_dims).data;
  return s;
}

ContrastParams load_contrast_params(const ModelWeights& w, int channels) {
  if (channels < 1) {
    raise(ErrorKind::kBadArgument,
          "load_contrast_params: channels must be >= 1");
  }
  const Tensor& fc1 = w.get("contrast.fc1.weight");
  if (fc1.dims.size() != 2 ||
      fc1.dims[1] != static_cast<std::uint32_t>(channels)) {
    raise(ErrorKind::kShape, "contrast.fc1.weight shape mismatch");
  }
  const std::uint32_t hidden = fc1.dims[0];
  const std::uint32_t fc1_b_dims[] = {hidden};
  const std::uint32_t fc2_w_dims[] = {static_cast<std::uint32_t>(channels),
                                       hidden};
  const std::uint32_t fc2_b_dims[] = {static_cast<std::uint32_t>(channels)};
  ContrastParams p;
  p.channels = channels;
  p.hidden = static_cast<int>(hidden);
  p.fc1_weight = fc1.data;
  p.fc1_bias = w.get("contrast.fc1.bias", fc1_b_dims).data;
  p.fc2_weight = w.get("contrast.fc2.weight", fc2_w_dims).data;
  p.fc2_bias = w.get("contrast.fc2.bias", fc2_b_dims).data;
  return p;
}

}  // namespace freq
}  // namespace ganc
