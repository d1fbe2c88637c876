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

#ifndef GANC_BSQ_HPP_
#define GANC_BSQ_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace ganc::bsq {

// Binary spherical quantization bottleneck. A d-dimensional latent is
// projected down to L dimensions, renormalized onto the unit hypersphere,
// and sign-quantized so every coordinate lands on +-1/sqrt(L). The 2^L sign
// patterns form the implicit codebook; no vectors are ever stored.

/// Projection pair around the bottleneck: `down` is L x d, `up` is d x L,
/// both row-major.
struct ProjectionWeights {
  int latent_dim = 0;     // d
  int code_dim = 0;       // L
  std::vector<float> down;
  std::vector<float> up;
};

/// v = down * z. Throws a shape error when len(z) != d.
std::vector<double> project(std::span<const double> z,
                            const ProjectionWeights& w);

/// u = v / ||v||_2. Inputs with ||v|| < 1e-12 are rejected as degenerate
/// rather than silently mapped to an arbitrary code.
std::vector<double> spherical_normalize(std::span<const double> v);

/// u_hat = (1/sqrt(L)) * sign(u), with sign(0) := +1 so the quantizer is
/// total and deterministic. Expects a unit vector.
std::vector<double> binary_quantize(std::span<const double> u);

/// z_hat = up * u_hat. Throws a shape error when len(code) != L.
std::vector<double> back_project(std::span<const double> code,
                                 const ProjectionWeights& w);

/// Quantized code -> token index. Bit i of the index is 1 iff code[i] > 0,
/// little-endian bit order. Entries must be +-1/sqrt(L) within 1e-9.
std::uint64_t code_to_token(std::span<const double> code);

/// Token index -> quantized code, the exact inverse of code_to_token.
std::vector<double> token_to_code(std::uint64_t token, int code_dim);

/// Factorized rate estimate: sum of per-bit binary entropies, in bits.
/// h(0) = h(1) = 0 by convention. Probabilities outside [0, 1] are a
/// domain error.
double rate_estimate(std::span<const double> bit_probs);

}  // namespace ganc::bsq

#endif  // GANC_BSQ_HPP_
