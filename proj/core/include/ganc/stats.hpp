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

#ifndef GANC_STATS_HPP_
#define GANC_STATS_HPP_

// Token-stream analyses: per-grid entropy/sparsity/uniqueness statistics,
// corpus-level codebook utilization, their Pearson correlations, and a
// comma-separated report file with a trailing token histogram.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ganc/token_grid.hpp"

namespace ganc {
namespace stats {

struct StatsReport {
  double entropy_bits = 0.0;
  std::uint64_t unique_tokens = 0;
  std::uint64_t total_tokens = 0;
  double sparsity = 0.0;  // unique / 2^L
  double mean_token_value = 0.0;
  double utilization = 0.0;  // equals sparsity for a single grid
};

/// Empirical Shannon entropy of the token histogram (no smoothing), counts,
/// sparsity = unique / 2^L, and the mean raw token value.
StatsReport compute_stats(const TokenGrid& grid);

/// Fraction of the 2^L codebook covered by the union of distinct tokens.
/// All grids must carry the same bit width as `bits`.
double corpus_utilization(std::span<const TokenGrid> grids, int bits);

/// Pearson correlations over the four columns (entropy_bits, sparsity,
/// unique_tokens, mean_token_value), row-major 4x4. Requires >= 3 reports.
/// Entries touching a zero-variance column are NaN (undefined, not 0).
inline constexpr int kCorrelationColumns = 4;
std::vector<double> correlation_matrix(std::span<const StatsReport> reports);

/// Report rows plus the corpus token histogram, the unit of the report file.
struct CorpusReport {
  std::vector<StatsReport> rows;
  std::map<std::uint64_t, std::uint64_t> histogram;  // token value -> count
};

CorpusReport build_corpus_report(std::span<const TokenGrid> grids, int bits);

/// Comma-separated file: fixed header, one row per grid, a blank line, then
/// a "histogram" block of token,count rows. Doubles print with enough
/// digits to round-trip exactly.
void export_report(const CorpusReport& report, const std::string& path);

CorpusReport parse_report(const std::string& path);

}  // namespace stats
}  // namespace ganc

#endif  // GANC_STATS_HPP_
