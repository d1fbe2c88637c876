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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ganc/error.hpp"
#include "ganc/image.hpp"
#include "ganc/metrics.hpp"
#include "ganc/rng.hpp"
#include "test_util.hpp"

using ganc::DeterministicRng;
using ganc::Error;
using ganc::Image;
namespace metrics = ganc::metrics;
using ganc::testutil::constant_image;
using ganc::testutil::gradient_image;
using ganc::testutil::random_image;

namespace {

Image add_noise(const Image& img, float amplitude, std::uint32_t seed) {
  DeterministicRng rng(seed);
  Image out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.set(y, x, c,
                img.at(y, x, c) + rng.uniform(-amplitude, amplitude));
      }
    }
  }
  return out;
}

// Independent single-window SSIM oracle: direct 11x11 Gaussian-weighted
// statistics at the one valid position of an 11x11 image, full formula,
// no separability tricks.
double naive_ssim_11x11_channel(const Image& a, const Image& b, int channel) {
  const double sigma = 1.5;
  double kernel[11][11];
  double ksum = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      const double dy = i - 5.0;
      const double dx = j - 5.0;
      kernel[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
      ksum += kernel[i][j];
    }
  }
  double mu_a = 0.0;
  double mu_b = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      const double w = kernel[i][j] / ksum;
      mu_a += w * a.at(i, j, channel);
      mu_b += w * b.at(i, j, channel);
    }
  }
  double var_a = 0.0;
  double var_b = 0.0;
  double cov = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      const double w = kernel[i][j] / ksum;
      const double da = a.at(i, j, channel) - mu_a;
      const double db = b.at(i, j, channel) - mu_b;
      var_a += w * da * da;
      var_b += w * db * db;
      cov += w * da * db;
    }
  }
  const double c1 = 1e-4;
  const double c2 = 9e-4;
  const double lum = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
  const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
  return std::max(lum * cs, 0.0);
}

}  // namespace

TEST_CASE("psnr of identical images is the infinity sentinel") {
  const Image img = random_image(9, 13, 101);
  CHECK(std::isinf(metrics::psnr(img, img)));
  CHECK(metrics::psnr(img, img) > 0.0);
}

TEST_CASE("psnr matches 10*log10(1/mse) on a known offset") {
  // Constant offset 0.1 on every sample: mse = 0.01 -> 20 dB.
  const Image a = constant_image(6, 6, 0.1f);
  const Image b = constant_image(6, 6, 0.2f);
  CHECK(metrics::psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(metrics::psnr(a, b) == metrics::psnr(b, a));
}

TEST_CASE("psnr requires matching shapes") {
  CHECK_THROWS_AS(
      (void)metrics::psnr(constant_image(4, 4, 0.0f),
                          constant_image(4, 5, 0.0f)),
      Error);
}

TEST_CASE("ms_ssim of an image with itself is 1") {
  const Image big = random_image(176, 176, 103);  // all 5 scales usable
  CHECK(metrics::ms_ssim(big, big) == doctest::Approx(1.0).epsilon(1e-6));
  const Image small = random_image(35, 35, 104);  // reduced scale count
  CHECK(metrics::ms_ssim(small, small) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ms_ssim is symmetric and bounded") {
  const Image a = random_image(44, 44, 105);
  const Image b = add_noise(a, 0.05f, 106);
  const double ab = metrics::ms_ssim(a, b);
  const double ba = metrics::ms_ssim(b, a);
  CHECK(std::abs(ab - ba) < 1e-9);
  CHECK(ab > 0.0);
  CHECK(ab <= 1.0);
}

TEST_CASE("ms_ssim decreases with noise strength") {
  const Image a = gradient_image(44, 44);
  const double weak = metrics::ms_ssim(a, add_noise(a, 0.02f, 107));
  const double strong = metrics::ms_ssim(a, add_noise(a, 0.25f, 108));
  CHECK(strong < weak);
  CHECK(weak < 1.0);
}

TEST_CASE("single-window ssim agrees with a direct implementation") {
  const Image a = random_image(11, 11, 109);
  const Image b = add_noise(a, 0.1f, 110);
  double expected = 0.0;
  for (int c = 0; c < 3; ++c) {
    expected += naive_ssim_11x11_channel(a, b, c);
  }
  expected /= 3.0;
  // 11x11 input: exactly one scale, weight renormalized to 1, one valid
  // window position.
  CHECK(metrics::ms_ssim(a, b) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ms_ssim rejects images below the window size") {
  const Image tiny = random_image(10, 10, 111);
  CHECK_THROWS_AS((void)metrics::ms_ssim(tiny, tiny), Error);
}

TEST_CASE("loss term uses 1 - ms_ssim when the window fits") {
  const Image a = random_image(32, 32, 112);
  const Image b = add_noise(a, 0.05f, 113);
  CHECK(metrics::ms_ssim_loss_term(a, b) ==
        doctest::Approx(1.0 - metrics::ms_ssim(a, b)).epsilon(1e-12));
}

TEST_CASE("loss term falls back to half mse on tiny images") {
  const Image a = constant_image(4, 4, 0.1f);
  const Image b = constant_image(4, 4, 0.3f);
  // mse = 0.04 -> fallback 0.02, up to float pixel rounding of 0.1 and 0.3.
  CHECK(metrics::ms_ssim_loss_term(a, b) ==
        doctest::Approx(0.02).epsilon(1e-6));
}

TEST_CASE("edge weights of the zero image are exactly 2 everywhere") {
  const Image img = constant_image(7, 9, 0.0f);
  for (double w : metrics::edge_weights(img)) CHECK(w == 2.0);
}

TEST_CASE("nonzero constants give exactly 2 in the interior") {
  // Zero padding makes border gradients nonzero for nonzero constants;
  // the interior sees no contrast regardless of the level.
  const Image img = constant_image(8, 8, 0.37f);
  const std::vector<double> w = metrics::edge_weights(img);
  for (int y = 1; y < 7; ++y) {
    for (int x = 1; x < 7; ++x) {
      CHECK(w[static_cast<std::size_t>(y) * 8 + x] == 2.0);
    }
  }
}

TEST_CASE("edge weights stay inside the open interval (1, 3)") {
  const Image img = random_image(16, 16, 115);
  for (double w : metrics::edge_weights(img)) {
    CHECK(w > 1.0);
    CHECK(w < 3.0);
  }
}

TEST_CASE("unit step gives the textbook Sobel response") {
  // Left half -0.5, right half +0.5 in all channels: gray step of height 1.
  Image img(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      for (int c = 0; c < 3; ++c) img.set(y, x, c, x < 4 ? -0.5f : 0.5f);
    }
  }
  const std::vector<double> w = metrics::edge_weights(img);
  // Interior pixel in the column just left of the boundary: |gx| = 4.
  const double expected = 2.0 / (1.0 + std::exp(-5.0 * 4.0)) + 1.0;
  CHECK(w[3 * 8 + 3] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(w[4 * 8 + 4] == doctest::Approx(expected).epsilon(1e-12));
  // Far from the edge (interior): no response.
  CHECK(w[3 * 8 + 1] == 2.0);
}

TEST_CASE("edge_weighted_l1 equals 2x the offset on a zero target") {
  const Image b = constant_image(9, 9, 0.0f);
  const Image a = constant_image(9, 9, 0.1f);
  CHECK(metrics::edge_weighted_l1(a, b) ==
        doctest::Approx(0.2).epsilon(1e-6));
  CHECK(metrics::edge_weighted_l1(b, b) == 0.0);
}

TEST_CASE("edge_weighted_l1 is bracketed by 1x and 3x plain L1") {
  const Image a = random_image(12, 12, 116);
  const Image b = random_image(12, 12, 117);
  double l1 = 0.0;
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      for (int c = 0; c < 3; ++c) {
        l1 += std::abs(static_cast<double>(a.at(y, x, c)) - b.at(y, x, c));
      }
    }
  }
  l1 /= 12.0 * 12.0 * 3.0;
  const double weighted = metrics::edge_weighted_l1(a, b);
  CHECK(weighted >= l1);
  CHECK(weighted <= 3.0 * l1);
}

TEST_CASE("yuv color loss is zero only on identical images") {
  const Image a = random_image(10, 10, 118);
  CHECK(metrics::yuv_color_loss(a, a) == 0.0);
  const Image b = add_noise(a, 0.02f, 119);
  CHECK(metrics::yuv_color_loss(a, b) > 0.0);
}

TEST_CASE("yuv conversion matrix is invertible") {
  // det != 0 means distinct RGB never collapses to equal YUV.
  const double m[3][3] = {{0.299, 0.587, 0.114},
                          {-0.14713, -0.28886, 0.436},
                          {0.615, -0.51499, -0.10001}};
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  CHECK(std::abs(det) > 0.1);
}

TEST_CASE("yuv color loss matches a hand computation") {
  // a = (0.1, 0, 0), b = 0: delta YUV is the matrix's first column * 0.1.
  const Image b = constant_image(2, 2, 0.0f);
  Image a = b;
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) a.set(y, x, 0, 0.1f);
  }
  const double dy = 0.299 * 0.1;
  const double du = -0.14713 * 0.1;
  const double dv = 0.615 * 0.1;
  const double expected =
      (0.5 * dy + 2.0 * std::abs(du) + 2.0 * std::abs(dv)) / 3.0;
  CHECK(metrics::yuv_color_loss(a, b) ==
        doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("hinge losses follow the adversarial formulas") {
  const std::vector<double> d_real = {2.0, 2.0};
  const std::vector<double> d_fake = {-2.0, -2.0};
  const metrics::HingeLosses h = metrics::hinge_losses(d_real, d_fake);
  CHECK(h.g_loss == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h.d_loss == doctest::Approx(0.0).epsilon(1e-12));

  // Mixed scores: relu terms computed by hand.
  const std::vector<double> real2 = {0.5, -1.0};
  const std::vector<double> fake2 = {0.25, -3.0};
  const metrics::HingeLosses h2 = metrics::hinge_losses(real2, fake2);
  CHECK(h2.g_loss == doctest::Approx(-(0.25 - 3.0) / 2.0).epsilon(1e-12));
  // d = mean(relu(1-0.5), relu(1+1)) + mean(relu(1+0.25), relu(1-3))
  CHECK(h2.d_loss ==
        doctest::Approx((0.5 + 2.0) / 2.0 + (1.25 + 0.0) / 2.0)
            .epsilon(1e-12));
}

TEST_CASE("hinge losses reject empty score sets") {
  const std::vector<double> some = {1.0};
  CHECK_THROWS_AS((void)metrics::hinge_losses({}, some), Error);
  CHECK_THROWS_AS((void)metrics::hinge_losses(some, {}), Error);
}

TEST_CASE("aggregate applies the published weights") {
  const metrics::LossReport r =
      metrics::aggregate_losses(1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(r.total == doctest::Approx(1.70).epsilon(1e-12));
  CHECK(r.reconstruction == 1.0);
  CHECK(r.ms_ssim_term == 1.0);
  CHECK(r.color == 1.0);
  REQUIRE(r.perceptual.has_value());
  REQUIRE(r.generator.has_value());

  // Distinct primes expose any weight/term mix-up.
  const metrics::LossReport probe =
      metrics::aggregate_losses(2.0, 3.0, 5.0, 7.0, 11.0);
  CHECK(probe.total ==
        doctest::Approx(2.0 + 0.2 * 7.0 + 0.3 * 3.0 + 0.15 * 5.0 +
                        0.05 * 11.0)
            .epsilon(1e-12));
}

TEST_CASE("absent optional loss terms contribute nothing") {
  const metrics::LossReport r = metrics::aggregate_losses(1.0, 1.0, 1.0);
  CHECK(!r.perceptual.has_value());
  CHECK(!r.generator.has_value());
  CHECK(r.total == doctest::Approx(1.45).epsilon(1e-12));
}

TEST_CASE("aggregate rejects negative or NaN mandatory terms") {
  CHECK_THROWS_AS((void)metrics::aggregate_losses(-1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS((void)metrics::aggregate_losses(1.0, -0.5, 1.0), Error);
  CHECK_THROWS_AS(
      (void)metrics::aggregate_losses(std::nan(""), 1.0, 1.0), Error);
  // Generator may be negative (hinge g_loss is unbounded below).
  const metrics::LossReport ok =
      metrics::aggregate_losses(1.0, 1.0, 1.0, std::nullopt, -4.0);
  CHECK(ok.total == doctest::Approx(1.45 - 0.2).epsilon(1e-12));
}
