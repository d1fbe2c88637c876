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

#include "ganc/bsq.hpp"

#include <cmath>
#include <string>

#include "ganc/error.hpp"

namespace ganc::bsq {

namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kCodeEntryTolerance = 1e-9;

void check_code_dim(int code_dim) {
  if (code_dim < 1 || code_dim > 64) {
    raise(ErrorKind::kDomain,
          "code dimension must be in [1, 64], got " + std::to_string(code_dim));
  }
}

}  // namespace

std::vector<double> project(std::span<const double> z,
                            const ProjectionWeights& w) {
  if (static_cast<int>(z.size()) != w.latent_dim) {
    raise(ErrorKind::kShape,
          "project: latent length " + std::to_string(z.size()) +
              " does not match projection d=" + std::to_string(w.latent_dim));
  }
  if (w.down.size() !=
      static_cast<std::size_t>(w.code_dim) * w.latent_dim) {
    raise(ErrorKind::kShape, "project: down matrix is not L x d");
  }
  std::vector<double> v(w.code_dim, 0.0);
  for (int i = 0; i < w.code_dim; ++i) {
    const float* row = w.down.data() + static_cast<std::size_t>(i) * w.latent_dim;
    double acc = 0.0;
    for (int j = 0; j < w.latent_dim; ++j) acc += static_cast<double>(row[j]) * z[j];
    v[i] = acc;
  }
  return v;
}

std::vector<double> spherical_normalize(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm >= kDegenerateNorm)) {
    raise(ErrorKind::kDomain,
          "spherical_normalize: degenerate input with norm " +
              std::to_string(norm));
  }
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] / norm;
  return u;
}

std::vector<double> binary_quantize(std::span<const double> u) {
  check_code_dim(static_cast<int>(u.size()));
  double sq = 0.0;
  for (double x : u) sq += x * x;
  if (std::abs(std::sqrt(sq) - 1.0) > 1e-3) {
    raise(ErrorKind::kDomain,
          "binary_quantize: input is not a unit vector (norm " +
              std::to_string(std::sqrt(sq)) + ")");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(u.size()));
  std::vector<double> q(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    q[i] = (u[i] < 0.0) ? -scale : scale;  // sign(0) = +1
  }
  return q;
}

std::vector<double> back_project(std::span<const double> code,
                                 const ProjectionWeights& w) {
  if (static_cast<int>(code.size()) != w.code_dim) {
    raise(ErrorKind::kShape,
          "back_project: code length " + std::to_string(code.size()) +
              " does not match projection L=" + std::to_string(w.code_dim));
  }
  if (w.up.size() != static_cast<std::size_t>(w.latent_dim) * w.code_dim) {
    raise(ErrorKind::kShape, "back_project: up matrix is not d x L");
  }
  std::vector<double> z(w.latent_dim, 0.0);
  for (int i = 0; i < w.latent_dim; ++i) {
    const float* row = w.up.data() + static_cast<std::size_t>(i) * w.code_dim;
    double acc = 0.0;
    for (int j = 0; j < w.code_dim; ++j) acc += static_cast<double>(row[j]) * code[j];
    z[i] = acc;
  }
  return z;
}

std::uint64_t code_to_token(std::span<const double> code) {
  const int L = static_cast<int>(code.size());
  check_code_dim(L);
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  std::uint64_t token = 0;
  for (int i = 0; i < L; ++i) {
    if (std::abs(std::abs(code[i]) - scale) > kCodeEntryTolerance) {
      raise(ErrorKind::kDomain,
            "code_to_token: entry " + std::to_string(i) +
                " is not +-1/sqrt(L): " + std::to_string(code[i]));
    }
    if (code[i] > 0.0) token |= std::uint64_t{1} << i;
  }
  return token;
}

std::vector<double> token_to_code(std::uint64_t token, int code_dim) {
  check_code_dim(code_dim);
  if (code_dim < 64 && token >= (std::uint64_t{1} << code_dim)) {
    raise(ErrorKind::kDomain,
          "token_to_code: token " + std::to_string(token) +
              " out of range for L=" + std::to_string(code_dim));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(code_dim));
  std::vector<double> code(code_dim);
  for (int i = 0; i < code_dim; ++i) {
    code[i] = ((token >> i) & 1) ? scale : -scale;
  }
  return code;
}

double rate_estimate(std::span<const double> bit_probs) {
  double bits = 0.0;
  for (double p : bit_probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      raise(ErrorKind::kDomain,
            "rate_estimate: probability out of [0, 1]: " + std::to_string(p));
    }
    if (p > 0.0 && p < 1.0) {
      bits += -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
    }
  }
  return bits;
}

}  // namespace ganc::bsq
