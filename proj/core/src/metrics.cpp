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

#include "ganc/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ganc/error.hpp"

namespace ganc {
namespace metrics {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * range)^2, range 1.0
constexpr double kC2 = 0.03 * 0.03;  // (K2 * range)^2
constexpr int kMaxScales = 5;
constexpr double kScaleWeights[kMaxScales] = {0.0448, 0.2856, 0.3001, 0.2363,
                                              0.1333};

double mse(const Image& a, const Image& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  const std::size_t n = a.pixel_count() * 3;
  for (std::size_t i = 0; i < n; ++i) {
    const double d =
        static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(n);
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    w[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

/// Valid separable Gaussian filtering: [h, w] -> [h-10, w-10].
std::vector<double> gaussian_valid(const std::vector<double>& x, int h,
                                   int w) {
  static const std::array<double, kWindow> win = gaussian_window();
  const int wh = h;
  const int ww = w - (kWindow - 1);
  std::vector<double> horiz(static_cast<std::size_t>(wh) * ww);
  for (int y = 0; y < wh; ++y) {
    for (int xo = 0; xo < ww; ++xo) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += win[k] * x[static_cast<std::size_t>(y) * w + xo + k];
      }
      horiz[static_cast<std::size_t>(y) * ww + xo] = acc;
    }
  }
  const int oh = h - (kWindow - 1);
  std::vector<double> out(static_cast<std::size_t>(oh) * ww);
  for (int yo = 0; yo < oh; ++yo) {
    for (int xo = 0; xo < ww; ++xo) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += win[k] * horiz[static_cast<std::size_t>(yo + k) * ww + xo];
      }
      out[static_cast<std::size_t>(yo) * ww + xo] = acc;
    }
  }
  return out;
}

std::vector<double> downsample2(const std::vector<double>& x, int h, int w) {
  const int oh = h / 2;
  const int ow = w / 2;
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int xo = 0; xo < ow; ++xo) {
      const std::size_t base = static_cast<std::size_t>(2 * y) * w + 2 * xo;
      out[static_cast<std::size_t>(y) * ow + xo] =
          0.25 * (x[base] + x[base + 1] + x[base + w] + x[base + w + 1]);
    }
  }
  return out;
}

/// Contrast-structure and (at the last scale) full SSIM means for one scale.
struct ScaleStats {
  double cs = 0.0;
  double ssim = 0.0;
};

ScaleStats ssim_scale(const std::vector<double>& x,
                      const std::vector<double>& y, int h, int w) {
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const std::vector<double> mu_x = gaussian_valid(x, h, w);
  const std::vector<double> mu_y = gaussian_valid(y, h, w);
  const std::vector<double> m_xx = gaussian_valid(xx, h, w);
  const std::vector<double> m_yy = gaussian_valid(yy, h, w);
  const std::vector<double> m_xy = gaussian_valid(xy, h, w);
  double cs_acc = 0.0;
  double ssim_acc = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double var_x = m_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = m_yy[i] - mu_y[i] * mu_y[i];
    const double cov = m_xy[i] - mu_x[i] * mu_y[i];
    const double cs = (2.0 * cov + kC2) / (var_x + var_y + kC2);
    const double lum = (2.0 * mu_x[i] * mu_y[i] + kC1) /
                       (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + kC1);
    cs_acc += cs;
    ssim_acc += lum * cs;
  }
  const double count = static_cast<double>(mu_x.size());
  return {cs_acc / count, ssim_acc / count};
}

std::vector<double> extract_channel(const Image& img, int c) {
  std::vector<double> out(img.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(img.data()[i * 3 + c]);
  }
  return out;
}

/// Largest usable scale count given floor-halving between scales.
int usable_scales(int h, int w, int requested) {
  int s = 0;
  while (s < requested && h >= kWindow && w >= kWindow) {
    ++s;
    h /= 2;
    w /= 2;
  }
  return s;
}

constexpr double kYuvMatrix[3][3] = {
    {0.299, 0.587, 0.114},
    {-0.14713, -0.28886, 0.436},
    {0.615, -0.51499, -0.10001},
};
constexpr double kYuvChannelWeights[3] = {0.5, 2.0, 2.0};

}  // namespace

double psnr(const Image& a, const Image& b) {
  const double err = mse(a, b);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / err);
}

double ms_ssim(const Image& a, const Image& b, int scales) {
  require_same_shape(a, b);
  if (scales < 1 || scales > kMaxScales) {
    raise(ErrorKind::kBadArgument, "ms_ssim: scales must be in [1, 5]");
  }
  const int s = usable_scales(a.height(), a.width(), scales);
  if (s == 0) {
    raise(ErrorKind::kDomain,
          "ms_ssim: image " + std::to_string(a.height()) + "x" +
              std::to_string(a.width()) + " is smaller than the 11x11 window");
  }
  // The published 5-scale weights are used as-is; a reduced scale count
  // renormalizes the surviving prefix to sum 1.
  double weights[kMaxScales];
  if (s == scales) {
    for (int j = 0; j < s; ++j) weights[j] = kScaleWeights[j];
  } else {
    double sum = 0.0;
    for (int j = 0; j < s; ++j) sum += kScaleWeights[j];
    for (int j = 0; j < s; ++j) weights[j] = kScaleWeights[j] / sum;
  }

  double channel_sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x = extract_channel(a, c);
    std::vector<double> y = extract_channel(b, c);
    int h = a.height();
    int w = a.width();
    double value = 1.0;
    for (int j = 0; j < s; ++j) {
      const ScaleStats stats = ssim_scale(x, y, h, w);
      // Negative means are clamped to zero before the fractional power.
      const double term = j + 1 < s ? stats.cs : stats.ssim;
      value *= std::pow(term < 0.0 ? 0.0 : term, weights[j]);
      if (j + 1 < s) {
        x = downsample2(x, h, w);
        y = downsample2(y, h, w);
        h /= 2;
        w /= 2;
      }
    }
    channel_sum += value;
  }
  return channel_sum / 3.0;
}

double ms_ssim_loss_term(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (usable_scales(a.height(), a.width(), 1) == 0) {
    return 0.5 * mse(a, b);
  }
  return 1.0 - ms_ssim(a, b);
}

std::vector<double> edge_weights(const Image& img) {
  const int h = img.height();
  const int w = img.width();
  std::vector<double> gray(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gray[static_cast<std::size_t>(y) * w + x] =
          0.299 * static_cast<double>(img.at(y, x, 0)) +
          0.587 * static_cast<double>(img.at(y, x, 1)) +
          0.114 * static_cast<double>(img.at(y, x, 2));
    }
  }
  static constexpr int kSobelX[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static constexpr int kSobelY[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  std::vector<double> out(gray.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx = 0.0;
      double gy = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= h) continue;  // zero padding
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = x + dx;
          if (sx < 0 || sx >= w) continue;
          const double v = gray[static_cast<std::size_t>(sy) * w + sx];
          gx += kSobelX[dy + 1][dx + 1] * v;
          gy += kSobelY[dy + 1][dx + 1] * v;
        }
      }
      const double magnitude = std::sqrt(gx * gx + gy * gy);
      out[static_cast<std::size_t>(y) * w + x] =
          2.0 / (1.0 + std::exp(-5.0 * magnitude)) + 1.0;
    }
  }
  return out;
}

double edge_weighted_l1(const Image& a, const Image& b) {
  require_same_shape(a, b);
  const std::vector<double> weights = edge_weights(b);
  double acc = 0.0;
  const int h = a.height();
  const int w = a.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double weight = weights[static_cast<std::size_t>(y) * w + x];
      for (int c = 0; c < 3; ++c) {
        acc += weight * std::abs(static_cast<double>(a.at(y, x, c)) -
                                 static_cast<double>(b.at(y, x, c)));
      }
    }
  }
  return acc / (static_cast<double>(a.pixel_count()) * 3.0);
}

double yuv_color_loss(const Image& a, const Image& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  const int h = a.height();
  const int w = a.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int row = 0; row < 3; ++row) {
        double da = 0.0;
        double db = 0.0;
        for (int c = 0; c < 3; ++c) {
          da += kYuvMatrix[row][c] * static_cast<double>(a.at(y, x, c));
          db += kYuvMatrix[row][c] * static_cast<double>(b.at(y, x, c));
        }
        acc += kYuvChannelWeights[row] * std::abs(da - db);
      }
    }
  }
  return acc / (static_cast<double>(a.pixel_count()) * 3.0);
}

HingeLosses hinge_losses(std::span<const double> d_real,
                         std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) {
    raise(ErrorKind::kDomain, "hinge_losses: empty score arrays");
  }
  double fake_mean = 0.0;
  double fake_hinge = 0.0;
  for (double v : d_fake) {
    fake_mean += v;
    const double h = 1.0 + v;
    fake_hinge += h > 0.0 ? h : 0.0;
  }
  fake_mean /= static_cast<double>(d_fake.size());
  fake_hinge /= static_cast<double>(d_fake.size());
  double real_hinge = 0.0;
  for (double v : d_real) {
    const double h = 1.0 - v;
    real_hinge += h > 0.0 ? h : 0.0;
  }
  real_hinge /= static_cast<double>(d_real.size());
  return {-fake_mean, real_hinge + fake_hinge};
}

LossReport aggregate_losses(double reconstruction, double ms_ssim_term,
                            double color, std::optional<double> perceptual,
                            std::optional<double> generator) {
  auto require_non_negative = [](const char* name, double v) {
    if (!(v >= 0.0)) {
      raise(ErrorKind::kDomain, std::string("aggregate_losses: ") + name +
                                    " must be non-negative, got " +
                                    std::to_string(v));
    }
  };
  require_non_negative("reconstruction", reconstruction);
  require_non_negative("ms_ssim_term", ms_ssim_term);
  require_non_negative("color", color);
  if (perceptual) require_non_negative("perceptual", *perceptual);

  LossReport report;
  report.reconstruction = reconstruction;
  report.ms_ssim_term = ms_ssim_term;
  report.color = color;
  report.perceptual = perceptual;
  report.generator = generator;
  report.total = reconstruction + 0.2 * perceptual.value_or(0.0) +
                 0.3 * ms_ssim_term + 0.15 * color +
                 0.05 * generator.value_or(0.0);
  return report;
}

}  // namespace metrics
}  // namespace ganc
