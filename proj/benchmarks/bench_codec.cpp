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

// Microbenchmarks for the hot paths: quantization, entropy coding, the
// block transform, tokenization and container packing.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "ganc/bsq.hpp"
#include "ganc/coder.hpp"
#include "ganc/container.hpp"
#include "ganc/freq.hpp"
#include "ganc/image.hpp"
#include "ganc/rng.hpp"
#include "ganc/token_grid.hpp"
#include "ganc/tokenizer.hpp"

namespace {

std::vector<double> unit_vector(int dim, std::uint64_t seed) {
  ganc::DeterministicRng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = rng.next_double() - 0.5;
  return ganc::bsq::spherical_normalize(v);
}

ganc::TokenGrid random_grid(int h, int w, int bits, std::uint64_t seed) {
  ganc::DeterministicRng rng(seed);
  std::vector<std::uint64_t> tokens(static_cast<std::size_t>(h) * w);
  for (auto& t : tokens) t = rng.below(1ull << bits);
  return ganc::TokenGrid(h, w, bits, std::move(tokens));
}

ganc::Image random_image(int h, int w, std::uint64_t seed) {
  ganc::DeterministicRng rng(seed);
  ganc::Image img(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.set(y, x, c, rng.uniform(ganc::kPixelMin, ganc::kPixelMax));
      }
    }
  }
  return img;
}

void BM_BinaryQuantize(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const std::vector<double> u = unit_vector(dim, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ganc::bsq::binary_quantize(u));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BinaryQuantize)->Arg(18)->Arg(36);

void BM_TokenRoundTrip(benchmark::State& state) {
  const std::vector<double> code = ganc::bsq::token_to_code(0xA5A5u, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ganc::bsq::code_to_token(ganc::bsq::token_to_code(0xA5A5u, 16)));
  }
  benchmark::DoNotOptimize(code);
}
BENCHMARK(BM_TokenRoundTrip);

void BM_AcEncode(benchmark::State& state) {
  const ganc::TokenGrid grid = random_grid(32, 32, 12, 2);
  for (auto _ : state) {
    ganc::coder::AdaptiveBitModel model(1, 12);
    benchmark::DoNotOptimize(ganc::coder::ac_encode(grid.tokens, 12, model));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(grid.tokens.size()));
}
BENCHMARK(BM_AcEncode);

void BM_AcDecode(benchmark::State& state) {
  const ganc::TokenGrid grid = random_grid(32, 32, 12, 3);
  ganc::coder::AdaptiveBitModel enc_model(1, 12);
  const ganc::coder::CodedStream stream =
      ganc::coder::ac_encode(grid.tokens, 12, enc_model);
  for (auto _ : state) {
    ganc::coder::AdaptiveBitModel model(1, 12);
    benchmark::DoNotOptimize(ganc::coder::ac_decode(stream, model));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(grid.tokens.size()));
}
BENCHMARK(BM_AcDecode);

void BM_Dct8x8Forward(benchmark::State& state) {
  ganc::DeterministicRng rng(4);
  std::vector<double> block(64);
  for (auto& v : block) v = rng.next_double() - 0.5;
  std::vector<double> out(64);
  for (auto _ : state) {
    ganc::freq::dct8x8_forward(block, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Dct8x8Forward);

void BM_Tokenize(benchmark::State& state) {
  ganc::codec::TokenizerConfig cfg;
  cfg.patch = 8;
  cfg.codebook_bits = 12;
  cfg.latent_dim = 32;
  cfg.depth = 1;
  cfg.heads = 4;
  cfg.enhance_hidden = 8;
  const ganc::ModelWeights w = ganc::codec::generate_weights(cfg, 5);
  const ganc::Image img = random_image(32, 32, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ganc::codec::tokenize(img, w, cfg));
  }
}
BENCHMARK(BM_Tokenize)->Unit(benchmark::kMillisecond);

void BM_SerializeRaw(benchmark::State& state) {
  const ganc::TokenGrid grid = random_grid(32, 32, 36, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ganc::container::serialize(
        grid, 8, ganc::container::CodingMode::kRaw, 0, std::nullopt));
  }
}
BENCHMARK(BM_SerializeRaw);

void BM_SerializeArith(benchmark::State& state) {
  const ganc::TokenGrid grid = random_grid(32, 32, 36, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ganc::container::serialize(
        grid, 8, ganc::container::CodingMode::kArithmetic, 1, std::nullopt));
  }
}
BENCHMARK(BM_SerializeArith);

}  // namespace

BENCHMARK_MAIN();
