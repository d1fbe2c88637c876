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

// Internal dense kernels for the tokenizer and enhancement heads. All
// reductions accumulate in double so results are independent of loop
// blocking; storage stays f32 to match the weights file.

#ifndef GANC_SRC_NN_KERNELS_HPP_
#define GANC_SRC_NN_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace ganc::detail {

/// y[n, out] = x[n, in] * w[out, in]^T + b[out]. b may be empty (no bias).
std::vector<float> linear_forward(std::span<const float> x, int n, int in_dim,
                                  std::span<const float> w,
                                  std::span<const float> b, int out_dim);

/// Per-row normalization over the last dimension:
/// (x - mean) / sqrt(var + eps) * gamma + beta with biased variance.
std::vector<float> layer_norm(std::span<const float> x, int n, int dim,
                              std::span<const float> gamma,
                              std::span<const float> beta,
                              double eps = 1e-5);

/// Exact GELU: 0.5 * x * (1 + erf(x / sqrt(2))).
float gelu(float x);
void gelu_inplace(std::vector<float>& x);

double sigmoid(double x);

float leaky_relu(float x, float slope);

/// Planar convolution with zero padding keeping spatial size:
/// in [c_in, h, w], weight [c_out, c_in, k, k], bias [c_out] (may be empty),
/// k odd. Returns [c_out, h, w].
std::vector<float> conv2d_same(std::span<const float> in, int c_in, int h,
                               int w, std::span<const float> weight,
                               std::span<const float> bias, int c_out, int k);

}  // namespace ganc::detail

#endif  // GANC_SRC_NN_KERNELS_HPP_
