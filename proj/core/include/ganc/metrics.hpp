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

#ifndef GANC_METRICS_HPP_
#define GANC_METRICS_HPP_

// Quality metrics and loss formulas as pure forward computations: PSNR,
// multi-scale SSIM, edge-weighted L1, YUV color consistency, hinge GAN
// losses, and their weighted aggregate. All math runs in double.

#include <optional>
#include <span>
#include <vector>

#include "ganc/image.hpp"

namespace ganc {
namespace metrics {

/// 10 * log10(range^2 / MSE) with data range 1.0. Identical images return
/// +infinity (serialized as the string "inf" by report writers).
double psnr(const Image& a, const Image& b);

/// Multi-scale SSIM, default 5 scales with the conventional weights
/// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333), 11x11 Gaussian window with
/// sigma 1.5, valid convolution, 2x2 average-pool downsampling, computed
/// per channel and averaged. When the image cannot support the requested
/// scale count the count is reduced and the surviving weights renormalized;
/// below 11x11 raises a domain error.
double ms_ssim(const Image& a, const Image& b, int scales = 5);

/// Loss form: 1 - ms_ssim(a, b); when the input is too small for even one
/// scale, substitutes 0.5 * MSE.
double ms_ssim_loss_term(const Image& a, const Image& b);

/// Per-pixel weights in (1, 3): grayscale (0.299, 0.587, 0.114) -> Sobel
/// magnitude with zero padding -> sigmoid(5 * magnitude) * 2 + 1. Constant
/// images give exactly 2.
std::vector<double> edge_weights(const Image& img);

/// Mean over pixels and channels of edge_weights(b) * |a - b|; the weights
/// come from the target image b. Always within [1x, 3x] of plain L1.
double edge_weighted_l1(const Image& a, const Image& b);

/// Both images to YUV, then mean over all elements of |delta| scaled by the
/// channel weights (0.5, 2, 2): chrominance errors cost 4x luminance.
double yuv_color_loss(const Image& a, const Image& b);

struct HingeLosses {
  double g_loss = 0.0;
  double d_loss = 0.0;
};

/// g = -mean(d_fake); d = mean(relu(1 - d_real)) + mean(relu(1 + d_fake)).
HingeLosses hinge_losses(std::span<const double> d_real,
                         std::span<const double> d_fake);

struct LossReport {
  double reconstruction = 0.0;
  std::optional<double> perceptual;
  double ms_ssim_term = 0.0;
  double color = 0.0;
  std::optional<double> generator;
  double total = 0.0;
};

/// total = reconstruction + 0.2 * perceptual + 0.3 * ms_ssim_term +
/// 0.15 * color + 0.05 * generator; absent optional terms contribute 0.
/// Every term except generator must be non-negative.
LossReport aggregate_losses(double reconstruction, double ms_ssim_term,
                            double color,
                            std::optional<double> perceptual = std::nullopt,
                            std::optional<double> generator = std::nullopt);

}  // namespace metrics
}  // namespace ganc

#endif  // GANC_METRICS_HPP_
