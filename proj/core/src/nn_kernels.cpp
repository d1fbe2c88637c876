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

#include "nn_kernels.hpp"

#include <cmath>

#include "ganc/error.hpp"

namespace ganc::detail {

std::vector<float> linear_forward(std::span<const float> x, int n, int in_dim,
                                  std::span<const float> w,
                                  std::span<const float> b, int out_dim) {
  if (n < 0 || in_dim < 1 || out_dim < 1 ||
      x.size() != static_cast<std::size_t>(n) * in_dim ||
      w.size() != static_cast<std::size_t>(out_dim) * in_dim ||
      (!b.empty() && b.size() != static_cast<std::size_t>(out_dim))) {
    raise(ErrorKind::kShape, "linear_forward: inconsistent shapes");
  }
  std::vector<float> y(static_cast<std::size_t>(n) * out_dim);
  for (int i = 0; i < n; ++i) {
    const float* xi = x.data() + static_cast<std::size_t>(i) * in_dim;
    float* yi = y.data() + static_cast<std::size_t>(i) * out_dim;
    for (int o = 0; o < out_dim; ++o) {
      const float* wo = w.data() + static_cast<std::size_t>(o) * in_dim;
      double acc = b.empty() ? 0.0 : static_cast<double>(b[o]);
      for (int k = 0; k < in_dim; ++k) {
        acc += static_cast<double>(xi[k]) * static_cast<double>(wo[k]);
      }
      yi[o] = static_cast<float>(acc);
    }
  }
  return y;
}

std::vector<float> layer_norm(std::span<const float> x, int n, int dim,
                              std::span<const float> gamma,
                              std::span<const float> beta, double eps) {
  if (n < 0 || dim < 1 || x.size() != static_cast<std::size_t>(n) * dim ||
      gamma.size() != static_cast<std::size_t>(dim) ||
      beta.size() != static_cast<std::size_t>(dim)) {
    raise(ErrorKind::kShape, "layer_norm: inconsistent shapes");
  }
  std::vector<float> y(x.size());
  for (int i = 0; i < n; ++i) {
    const float* xi = x.data() + static_cast<std::size_t>(i) * dim;
    float* yi = y.data() + static_cast<std::size_t>(i) * dim;
    double mean = 0.0;
    for (int k = 0; k < dim; ++k) mean += xi[k];
    mean /= dim;
    double var = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = xi[k] - mean;
      var += d * d;
    }
    var /= dim;
    const double inv = 1.0 / std::sqrt(var + eps);
    for (int k = 0; k < dim; ++k) {
      yi[k] = static_cast<float>((xi[k] - mean) * inv * gamma[k] + beta[k]);
    }
  }
  return y;
}

float gelu(float x) {
  const double xd = x;
  return static_cast<float>(0.5 * xd * (1.0 + std::erf(xd / std::sqrt(2.0))));
}

void gelu_inplace(std::vector<float>& x) {
  for (float& v : x) v = gelu(v);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

float leaky_relu(float x, float slope) { return x >= 0.0f ? x : slope * x; }

std::vector<float> conv2d_same(std::span<const float> in, int c_in, int h,
                               int w, std::span<const float> weight,
                               std::span<const float> bias, int c_out, int k) {
  if (c_in < 1 || c_out < 1 || h < 1 || w < 1 || k < 1 || k % 2 == 0 ||
      in.size() != static_cast<std::size_t>(c_in) * h * w ||
      weight.size() != static_cast<std::size_t>(c_out) * c_in * k * k ||
      (!bias.empty() && bias.size() != static_cast<std::size_t>(c_out))) {
    raise(ErrorKind::kShape, "conv2d_same: inconsistent shapes");
  }
  const int pad = k / 2;
  std::vector<float> out(static_cast<std::size_t>(c_out) * h * w);
  for (int co = 0; co < c_out; ++co) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = bias.empty() ? 0.0 : static_cast<double>(bias[co]);
        for (int ci = 0; ci < c_in; ++ci) {
          const float* plane = in.data() + static_cast<std::size_t>(ci) * h * w;
          const float* wk = weight.data() +
                            ((static_cast<std::size_t>(co) * c_in + ci) * k) * k;
          for (int dy = 0; dy < k; ++dy) {
            const int sy = y + dy - pad;
            if (sy < 0 || sy >= h) continue;
            for (int dx = 0; dx < k; ++dx) {
              const int sx = x + dx - pad;
              if (sx < 0 || sx >= w) continue;
              acc += static_cast<double>(plane[sy * w + sx]) *
                     static_cast<double>(wk[dy * k + dx]);
            }
          }
        }
        out[(static_cast<std::size_t>(co) * h + y) * w + x] =
            static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace ganc::detail
