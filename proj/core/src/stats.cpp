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

#include "ganc/stats.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "ganc/error.hpp"

namespace ganc {
namespace stats {

namespace {

constexpr char kHeader[] =
    "entropy_bits,unique_tokens,total_tokens,sparsity,mean_token_value,"
    "utilization";

double codebook_size(int bits) { return std::ldexp(1.0, bits); }

std::map<std::uint64_t, std::uint64_t> histogram_of(const TokenGrid& grid) {
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t t : grid.tokens) ++hist[t];
  return hist;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    raise(ErrorKind::kFormat,
          "report '" + path + "': bad numeric field '" + s + "'");
  }
  return v;
}

std::uint64_t parse_count(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    raise(ErrorKind::kFormat,
          "report '" + path + "': bad count field '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

StatsReport compute_stats(const TokenGrid& grid) {
  if (grid.tokens.empty()) {
    raise(ErrorKind::kDomain, "compute_stats: empty token grid");
  }
  grid.validate();
  const std::map<std::uint64_t, std::uint64_t> hist = histogram_of(grid);
  const double total = static_cast<double>(grid.tokens.size());

  StatsReport r;
  r.total_tokens = grid.tokens.size();
  r.unique_tokens = hist.size();
  double entropy = 0.0;
  double mean = 0.0;
  for (const auto& [token, count] : hist) {
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log2(p);
    mean += static_cast<double>(token) * static_cast<double>(count);
  }
  r.entropy_bits = entropy;
  r.mean_token_value = mean / total;
  r.sparsity = static_cast<double>(r.unique_tokens) / codebook_size(grid.bits);
  r.utilization = r.sparsity;
  return r;
}

double corpus_utilization(std::span<const TokenGrid> grids, int bits) {
  if (grids.empty()) {
    raise(ErrorKind::kDomain, "corpus_utilization: empty corpus");
  }
  std::map<std::uint64_t, std::uint64_t> distinct;
  for (const TokenGrid& g : grids) {
    g.validate();
    if (g.bits != bits) {
      raise(ErrorKind::kDomain,
            "corpus_utilization: grid holds " + std::to_string(g.bits) +
                "-bit tokens, corpus is " + std::to_string(bits) + "-bit");
    }
    for (std::uint64_t t : g.tokens) ++distinct[t];
  }
  return static_cast<double>(distinct.size()) / codebook_size(bits);
}

std::vector<double> correlation_matrix(std::span<const StatsReport> reports) {
  if (reports.size() < 3) {
    raise(ErrorKind::kDomain,
          "correlation_matrix: need >= 3 reports, got " +
              std::to_string(reports.size()));
  }
  const int k = kCorrelationColumns;
  const std::size_t n = reports.size();
  std::vector<double> columns(static_cast<std::size_t>(k) * n);
  for (std::size_t i = 0; i < n; ++i) {
    columns[0 * n + i] = reports[i].entropy_bits;
    columns[1 * n + i] = reports[i].sparsity;
    columns[2 * n + i] = static_cast<double>(reports[i].unique_tokens);
    columns[3 * n + i] = reports[i].mean_token_value;
  }
  double means[kCorrelationColumns];
  double vars[kCorrelationColumns];
  for (int c = 0; c < k; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += columns[c * n + i];
    m /= static_cast<double>(n);
    means[c] = m;
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = columns[c * n + i] - m;
      v += d * d;
    }
    vars[c] = v;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(static_cast<std::size_t>(k) * k, nan);
  for (int a = 0; a < k; ++a) {
    if (vars[a] <= 0.0) continue;  // undefined stays NaN
    out[static_cast<std::size_t>(a) * k + a] = 1.0;
    for (int b = a + 1; b < k; ++b) {
      if (vars[b] <= 0.0) continue;
      double cov = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cov += (columns[a * n + i] - means[a]) * (columns[b * n + i] - means[b]);
      }
      const double r = cov / std::sqrt(vars[a] * vars[b]);
      out[static_cast<std::size_t>(a) * k + b] = r;
      out[static_cast<std::size_t>(b) * k + a] = r;
    }
  }
  return out;
}

CorpusReport build_corpus_report(std::span<const TokenGrid> grids, int bits) {
  if (grids.empty()) {
    raise(ErrorKind::kDomain, "build_corpus_report: empty corpus");
  }
  CorpusReport report;
  const double utilization = corpus_utilization(grids, bits);
  for (const TokenGrid& g : grids) {
    StatsReport row = compute_stats(g);
    if (grids.size() > 1) row.utilization = utilization;
    report.rows.push_back(row);
    for (std::uint64_t t : g.tokens) ++report.histogram[t];
  }
  return report;
}

void export_report(const CorpusReport& report, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    raise(ErrorKind::kIo, "report: cannot open '" + path + "' for writing");
  }
  std::string body = std::string(kHeader) + "\n";
  for (const StatsReport& r : report.rows) {
    body += format_double(r.entropy_bits);
    body += ',';
    body += std::to_string(r.unique_tokens);
    body += ',';
    body += std::to_string(r.total_tokens);
    body += ',';
    body += format_double(r.sparsity);
    body += ',';
    body += format_double(r.mean_token_value);
    body += ',';
    body += format_double(r.utilization);
    body += '\n';
  }
  body += "\nhistogram\ntoken,count\n";
  for (const auto& [token, count] : report.histogram) {
    body += std::to_string(token);
    body += ',';
    body += std::to_string(count);
    body += '\n';
  }
  const std::size_t written = std::fwrite(body.data(), 1, body.size(), f);
  const int close_rc = std::fclose(f);
  if (written != body.size() || close_rc != 0) {
    raise(ErrorKind::kIo, "report: short write to '" + path + "'");
  }
}

CorpusReport parse_report(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    raise(ErrorKind::kIo, "report: cannot open '" + path + "'");
  }
  std::string text;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
  const bool read_error = std::ferror(f) != 0;
  std::fclose(f);
  if (read_error) {
    raise(ErrorKind::kIo, "report: read failure on '" + path + "'");
  }

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty() || lines[0] != kHeader) {
    raise(ErrorKind::kFormat, "report '" + path + "': missing header");
  }

  CorpusReport report;
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    const std::vector<std::string> fields = split_fields(lines[i]);
    if (fields.size() != 6) {
      raise(ErrorKind::kFormat,
            "report '" + path + "': row has " +
                std::to_string(fields.size()) + " fields, expected 6");
    }
    StatsReport r;
    r.entropy_bits = parse_double(fields[0], path);
    r.unique_tokens = parse_count(fields[1], path);
    r.total_tokens = parse_count(fields[2], path);
    r.sparsity = parse_double(fields[3], path);
    r.mean_token_value = parse_double(fields[4], path);
    r.utilization = parse_double(fields[5], path);
    report.rows.push_back(r);
  }
  if (i >= lines.size() || lines[i].empty()) ++i;
  if (i + 1 >= lines.size() || lines[i] != "histogram" ||
      lines[i + 1] != "token,count") {
    raise(ErrorKind::kFormat,
          "report '" + path + "': missing histogram block");
  }
  for (i += 2; i < lines.size() && !lines[i].empty(); ++i) {
    const std::vector<std::string> fields = split_fields(lines[i]);
    if (fields.size() != 2) {
      raise(ErrorKind::kFormat, "report '" + path + "': bad histogram row");
    }
    report.histogram[parse_count(fields[0], path)] =
        parse_count(fields[1], path);
  }
  return report;
}

}  // namespace stats
}  // namespace ganc
