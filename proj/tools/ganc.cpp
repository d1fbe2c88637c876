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

// Command-line codec driver: encode, decode, roundtrip, stats, init-weights.
//
// Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 malformed or
// out-of-domain data. Option precedence: flags > config file > defaults,
// with GANC_WEIGHTS as a weights-path fallback below both. All output
// files are written atomically (temp file + rename).

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ganc/container.hpp"
#include "ganc/error.hpp"
#include "ganc/image.hpp"
#include "ganc/metrics.hpp"
#include "ganc/ppm.hpp"
#include "ganc/stats.hpp"
#include "ganc/token_grid.hpp"
#include "ganc/tokenizer.hpp"
#include "ganc/weights.hpp"
#include "jpeg_codec.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

int exit_code_for(ganc::ErrorKind kind) {
  switch (kind) {
    case ganc::ErrorKind::kBadArgument:
      return kExitUsage;
    case ganc::ErrorKind::kIo:
      return kExitIo;
    case ganc::ErrorKind::kShape:
    case ganc::ErrorKind::kDomain:
    case ganc::ErrorKind::kFormat:
    case ganc::ErrorKind::kTruncation:
      return kExitData;
  }
  return kExitData;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    ganc::raise(ganc::ErrorKind::kIo, "cannot open '" + path + "'");
  }
  std::vector<std::uint8_t> bytes;
  std::uint8_t buf[1 << 16];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) {
    bytes.insert(bytes.end(), buf, buf + n);
  }
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) {
    ganc::raise(ganc::ErrorKind::kIo, "read failure on '" + path + "'");
  }
  return bytes;
}

// Writes to <path>.tmp then renames, so a failure never leaves a partial
// artifact at the destination.
void atomic_write_file(const std::string& path,
                       std::span<const std::uint8_t> bytes) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) {
    ganc::raise(ganc::ErrorKind::kIo, "cannot open '" + tmp + "' for writing");
  }
  const std::size_t written =
      bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), f);
  const int close_rc = std::fclose(f);
  if (written != bytes.size() || close_rc != 0) {
    std::remove(tmp.c_str());
    ganc::raise(ganc::ErrorKind::kIo, "short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    ganc::raise(ganc::ErrorKind::kIo,
                "cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

int parse_int_value(const std::string& text, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "config value for '" + key + "' is not an integer: " + text);
  }
  return static_cast<int>(v);
}

bool parse_bool_value(const std::string& text, const std::string& key) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") {
    return true;
  }
  if (text == "0" || text == "false" || text == "off" || text == "no") {
    return false;
  }
  ganc::raise(ganc::ErrorKind::kBadArgument,
              "config value for '" + key + "' is not a boolean: " + text);
}

// Simple key=value file; blank lines and lines starting with '#' ignored.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  const std::string text(bytes.begin(), bytes.end());
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string line = trim(
        text.substr(pos, eol == std::string::npos ? eol : eol - pos));
    ++line_no;
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      ganc::raise(ganc::ErrorKind::kBadArgument,
                  path + ":" + std::to_string(line_no) +
                      ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Shared codec options registered on encode/decode/roundtrip subcommands.
struct CodecCli {
  CLI::App* cmd = nullptr;
  std::string input;
  std::string output;
  std::string config_path;
  std::string weights;
  std::string mode = "arith";
  int patch = 8;
  int bits = 16;
  int order = 1;
  bool jpeg_fallback = false;
};

void add_codec_options(CodecCli& c) {
  c.cmd->add_option("--config", c.config_path,
                    "key=value config file (flags take precedence)");
  c.cmd->add_option("--patch", c.patch, "patch size in pixels");
  c.cmd->add_option("--bits", c.bits, "token code length L");
  c.cmd->add_option("--mode", c.mode, "token coding mode: raw|arith");
  c.cmd->add_option("--order", c.order, "adaptive context order: 0|1|2");
  c.cmd->add_option("--weights", c.weights,
                    "model weights file (falls back to GANC_WEIGHTS)");
  c.cmd->add_flag("--jpeg-fallback", c.jpeg_fallback,
                  "embed a JPEG fallback image when under budget");
}

struct ResolvedCodec {
  int patch = 8;
  int bits = 16;
  int order = 1;
  ganc::container::CodingMode mode = ganc::container::CodingMode::kArithmetic;
  std::string weights_path;
  bool jpeg_fallback = false;
  bool patch_explicit = false;
  bool bits_explicit = false;
};

ResolvedCodec resolve_codec(const CodecCli& c) {
  ResolvedCodec r;
  std::string mode_text = "arith";

  if (c.cmd->count("--config") > 0) {
    std::map<std::string, std::string> kv = parse_config_file(c.config_path);
    auto take = [&kv](const char* key) -> std::optional<std::string> {
      auto it = kv.find(key);
      if (it == kv.end()) return std::nullopt;
      std::string v = it->second;
      kv.erase(it);
      return v;
    };
    if (auto v = take("patch")) {
      r.patch = parse_int_value(*v, "patch");
      r.patch_explicit = true;
    }
    if (auto v = take("bits")) {
      r.bits = parse_int_value(*v, "bits");
      r.bits_explicit = true;
    }
    if (auto v = take("mode")) mode_text = *v;
    if (auto v = take("order")) r.order = parse_int_value(*v, "order");
    if (auto v = take("weights")) r.weights_path = *v;
    if (auto v = take("jpeg_fallback")) {
      r.jpeg_fallback = parse_bool_value(*v, "jpeg_fallback");
    }
    if (!kv.empty()) {
      ganc::raise(ganc::ErrorKind::kBadArgument,
                  "unknown config key '" + kv.begin()->first + "' in " +
                      c.config_path);
    }
  }

  if (c.cmd->count("--patch") > 0) {
    r.patch = c.patch;
    r.patch_explicit = true;
  }
  if (c.cmd->count("--bits") > 0) {
    r.bits = c.bits;
    r.bits_explicit = true;
  }
  if (c.cmd->count("--mode") > 0) mode_text = c.mode;
  if (c.cmd->count("--order") > 0) r.order = c.order;
  if (c.cmd->count("--weights") > 0) r.weights_path = c.weights;
  if (c.cmd->count("--jpeg-fallback") > 0) r.jpeg_fallback = c.jpeg_fallback;

  if (r.weights_path.empty()) {
    if (const char* env = std::getenv("GANC_WEIGHTS")) r.weights_path = env;
  }

  if (r.patch < 1 || r.patch > 255) {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "patch must be in [1, 255], got " + std::to_string(r.patch));
  }
  if (r.bits < 1 || r.bits > 64) {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "bits must be in [1, 64], got " + std::to_string(r.bits));
  }
  if (r.order < 0 || r.order > 2) {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "order must be 0, 1, or 2, got " + std::to_string(r.order));
  }
  if (mode_text == "raw") {
    r.mode = ganc::container::CodingMode::kRaw;
  } else if (mode_text == "arith") {
    r.mode = ganc::container::CodingMode::kArithmetic;
  } else {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "mode must be 'raw' or 'arith', got '" + mode_text + "'");
  }
  return r;
}

struct LoadedModel {
  ganc::ModelWeights weights;
  ganc::codec::TokenizerConfig cfg;
};

LoadedModel load_model(const ResolvedCodec& r) {
  if (r.weights_path.empty()) {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "no weights file given: pass --weights, set weights= in the "
                "config file, or set GANC_WEIGHTS");
  }
  LoadedModel m;
  m.weights = ganc::ModelWeights::load(r.weights_path);
  m.cfg = ganc::codec::infer_config(m.weights);
  if (r.patch_explicit && r.patch != m.cfg.patch) {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "requested patch " + std::to_string(r.patch) +
                    " but weights were built for patch " +
                    std::to_string(m.cfg.patch));
  }
  if (r.bits_explicit && r.bits != m.cfg.codebook_bits) {
    ganc::raise(ganc::ErrorKind::kBadArgument,
                "requested bits " + std::to_string(r.bits) +
                    " but weights were built for bits " +
                    std::to_string(m.cfg.codebook_bits));
  }
  return m;
}

std::string fmt4(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void print_size_report(std::size_t container_bytes, int height, int width) {
  const double pixels = static_cast<double>(height) * width;
  const double bpp = static_cast<double>(container_bytes) * 8.0 / pixels;
  const double ratio = pixels * 3.0 / static_cast<double>(container_bytes);
  std::printf("size_bytes: %zu\n", container_bytes);
  std::printf("bpp: %s\n", fmt4(bpp).c_str());
  std::printf("compression_ratio: %s\n", fmt4(ratio).c_str());
}

std::vector<std::uint8_t> encode_to_container(const ganc::Image& img,
                                              const LoadedModel& m,
                                              const ResolvedCodec& r,
                                              ganc::TokenGrid* grid_out) {
  ganc::TokenGrid grid = ganc::codec::tokenize(img, m.weights, m.cfg);
  std::vector<std::uint8_t> bytes =
      ganc::container::serialize(grid, m.cfg.patch, r.mode, r.order);
  if (r.jpeg_fallback) {
    const std::optional<std::vector<std::uint8_t>> jpeg =
        ganc::container::jpeg_fallback_select(
            bytes.size(), img.height(), img.width(), [&img](int quality) {
              return ganc::tools::jpeg_encode(img, quality);
            });
    if (jpeg) {
      bytes = ganc::container::serialize(grid, m.cfg.patch, r.mode, r.order,
                                         jpeg);
    }
  }
  if (grid_out) *grid_out = std::move(grid);
  return bytes;
}

// Reconstruction used by both decode and roundtrip: neural decode plus the
// 0.7/0.3 fallback blend when a usable JPEG is present. A fallback that
// fails to decode is reported and ignored (tolerant path).
ganc::Image reconstruct(const ganc::container::DecodedContainer& dec,
                        const LoadedModel& m) {
  if (dec.patch != m.cfg.patch) {
    ganc::raise(ganc::ErrorKind::kShape,
                "container encoded with patch " + std::to_string(dec.patch) +
                    " but weights expect patch " +
                    std::to_string(m.cfg.patch));
  }
  if (dec.grid.bits != m.cfg.codebook_bits) {
    ganc::raise(ganc::ErrorKind::kShape,
                "container encoded with bits " +
                    std::to_string(dec.grid.bits) + " but weights expect " +
                    std::to_string(m.cfg.codebook_bits));
  }
  ganc::Image neural = ganc::codec::detokenize(dec.grid, m.weights, m.cfg);
  if (dec.jpeg && !dec.jpeg->empty()) {
    try {
      const ganc::Image base = ganc::tools::jpeg_decode(*dec.jpeg);
      return ganc::container::blend_decode(neural, base);
    } catch (const ganc::Error& e) {
      std::fprintf(stderr,
                   "warning: ignoring fallback image (%s); writing neural "
                   "output only\n",
                   e.what());
    }
  }
  return neural;
}

int cmd_encode(const CodecCli& c) {
  const ResolvedCodec r = resolve_codec(c);
  const ganc::Image img = ganc::ppm::read_file(c.input);
  const LoadedModel m = load_model(r);
  const std::vector<std::uint8_t> bytes =
      encode_to_container(img, m, r, nullptr);
  atomic_write_file(c.output, bytes);
  print_size_report(bytes.size(), img.height(), img.width());
  return kExitOk;
}

int cmd_decode(const CodecCli& c) {
  const ResolvedCodec r = resolve_codec(c);
  const std::vector<std::uint8_t> bytes = read_binary_file(c.input);
  const ganc::container::DecodedContainer dec =
      ganc::container::deserialize(bytes);
  const LoadedModel m = load_model(r);
  const ganc::Image out = reconstruct(dec, m);
  atomic_write_file(c.output, ganc::ppm::encode(out));
  return kExitOk;
}

int cmd_roundtrip(const CodecCli& c) {
  const ResolvedCodec r = resolve_codec(c);
  const ganc::Image img = ganc::ppm::read_file(c.input);
  const LoadedModel m = load_model(r);
  ganc::TokenGrid grid(1, 1, 1, {0});
  const std::vector<std::uint8_t> bytes = encode_to_container(img, m, r, &grid);
  const ganc::container::DecodedContainer dec =
      ganc::container::deserialize(bytes);
  const bool tokens_exact = dec.grid == grid;
  const ganc::Image recon = reconstruct(dec, m);

  std::printf("psnr: %s\n", fmt4(ganc::metrics::psnr(img, recon)).c_str());
  std::printf("ssim: %s\n", fmt4(ganc::metrics::ms_ssim(img, recon)).c_str());
  std::printf("edge_weighted_l1: %s\n",
              fmt4(ganc::metrics::edge_weighted_l1(recon, img)).c_str());
  std::printf("yuv_loss: %s\n",
              fmt4(ganc::metrics::yuv_color_loss(recon, img)).c_str());
  const double pixels = static_cast<double>(img.height()) * img.width();
  std::printf("bpp: %s\n",
              fmt4(static_cast<double>(bytes.size()) * 8.0 / pixels).c_str());
  std::printf("compression_ratio: %s\n",
              fmt4(pixels * 3.0 / static_cast<double>(bytes.size())).c_str());
  std::printf("tokens: %s\n", tokens_exact ? "exact" : "MISMATCH");
  if (!tokens_exact) {
    std::fprintf(stderr,
                 "error: token payload changed across the container round "
                 "trip\n");
    return kExitData;
  }
  if (!c.output.empty()) {
    atomic_write_file(c.output, ganc::ppm::encode(recon));
  }
  return kExitOk;
}

int cmd_stats(const std::vector<std::string>& paths, bool keep_going,
              const std::string& out_path) {
  std::vector<std::string> names;
  std::vector<ganc::TokenGrid> grids;
  for (const std::string& path : paths) {
    try {
      const std::vector<std::uint8_t> bytes = read_binary_file(path);
      grids.push_back(ganc::container::deserialize(bytes).grid);
      names.push_back(path);
    } catch (const ganc::Error& e) {
      if (!keep_going) throw;
      std::fprintf(stderr, "warning: skipping %s: %s\n", path.c_str(),
                   e.what());
    }
  }

  std::printf(
      "file,entropy_bits,unique_tokens,total_tokens,sparsity,"
      "mean_token_value,utilization\n");
  if (grids.empty()) return kExitOk;

  std::vector<ganc::stats::StatsReport> rows;
  rows.reserve(grids.size());
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const ganc::stats::StatsReport row = ganc::stats::compute_stats(grids[i]);
    rows.push_back(row);
    std::printf("%s,%.6f,%" PRIu64 ",%" PRIu64 ",%.6g,%.6f,%.6g\n",
                names[i].c_str(), row.entropy_bits, row.unique_tokens,
                row.total_tokens, row.sparsity, row.mean_token_value,
                row.utilization);
  }

  const int bits = grids.front().bits;
  const double corpus = ganc::stats::corpus_utilization(grids, bits);
  std::printf("corpus_utilization: %.6g\n", corpus);

  if (rows.size() >= 3) {
    const std::vector<double> corr = ganc::stats::correlation_matrix(rows);
    std::printf("correlation_matrix:\n");
    for (int i = 0; i < ganc::stats::kCorrelationColumns; ++i) {
      for (int j = 0; j < ganc::stats::kCorrelationColumns; ++j) {
        const double v = corr[static_cast<std::size_t>(
            i * ganc::stats::kCorrelationColumns + j)];
        if (j > 0) std::printf(",");
        if (std::isnan(v)) {
          std::printf("null");
        } else {
          std::printf("%.6f", v);
        }
      }
      std::printf("\n");
    }
  }

  if (!out_path.empty()) {
    const ganc::stats::CorpusReport report =
        ganc::stats::build_corpus_report(grids, bits);
    const std::string tmp = out_path + ".tmp";
    ganc::stats::export_report(report, tmp);
    if (std::rename(tmp.c_str(), out_path.c_str()) != 0) {
      std::remove(tmp.c_str());
      ganc::raise(ganc::ErrorKind::kIo,
                  "cannot rename '" + tmp + "' to '" + out_path + "'");
    }
  }
  return kExitOk;
}

int cmd_init_weights(const ganc::codec::TokenizerConfig& cfg,
                     std::uint32_t seed, const std::string& out_path) {
  cfg.validate();
  const ganc::ModelWeights w = ganc::codec::generate_weights(cfg, seed);
  atomic_write_file(out_path, w.to_bytes());
  std::printf("patch: %d\nbits: %d\nlatent_dim: %d\ndepth: %d\nheads: %d\n",
              cfg.patch, cfg.codebook_bits, cfg.latent_dim, cfg.depth,
              cfg.heads);
  std::printf("seed: %" PRIu32 "\ntensors: %zu\n", seed, w.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic learned image codec with token containers"};
  app.require_subcommand(1);

  CodecCli enc;
  enc.cmd = app.add_subcommand("encode", "encode a PPM image to a container");
  enc.cmd->add_option("input", enc.input, "input image (PPM P6)")->required();
  enc.cmd->add_option("-o,--output", enc.output, "output container path")
      ->required();
  add_codec_options(enc);

  CodecCli dec;
  dec.cmd = app.add_subcommand("decode", "decode a container to a PPM image");
  dec.cmd->add_option("input", dec.input, "input container")->required();
  dec.cmd->add_option("-o,--output", dec.output, "output image path (PPM P6)")
      ->required();
  add_codec_options(dec);

  CodecCli rt;
  rt.cmd = app.add_subcommand(
      "roundtrip", "encode then decode in memory and report metrics");
  rt.cmd->add_option("input", rt.input, "input image (PPM P6)")->required();
  rt.cmd->add_option("-o,--output", rt.output,
                     "optional path for the reconstructed image");
  add_codec_options(rt);

  std::vector<std::string> stats_paths;
  bool stats_keep_going = false;
  std::string stats_out;
  CLI::App* st = app.add_subcommand(
      "stats", "token statistics over one or more containers");
  st->add_option("containers", stats_paths, "container files")
      ->required()
      ->expected(-1);
  st->add_flag("--keep-going", stats_keep_going,
               "warn and continue past malformed containers");
  st->add_option("-o,--output", stats_out, "write a parseable corpus report");

  ganc::codec::TokenizerConfig init_cfg;
  std::uint32_t init_seed = 1;
  std::string init_out;
  CLI::App* iw = app.add_subcommand(
      "init-weights", "generate a deterministic random-init weights file");
  iw->add_option("-o,--output", init_out, "output weights path")->required();
  iw->add_option("--patch", init_cfg.patch, "patch size in pixels");
  iw->add_option("--bits", init_cfg.codebook_bits, "token code length L");
  iw->add_option("--latent-dim", init_cfg.latent_dim,
                 "transformer embedding width");
  iw->add_option("--depth", init_cfg.depth, "transformer blocks per side");
  iw->add_option("--heads", init_cfg.heads, "attention heads");
  iw->add_option("--enhance-hidden", init_cfg.enhance_hidden,
                 "enhancement conv hidden channels");
  iw->add_option("--seed", init_seed, "deterministic init seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (enc.cmd->parsed()) return cmd_encode(enc);
    if (dec.cmd->parsed()) return cmd_decode(dec);
    if (rt.cmd->parsed()) return cmd_roundtrip(rt);
    if (st->parsed()) {
      return cmd_stats(stats_paths, stats_keep_going, stats_out);
    }
    if (iw->parsed()) return cmd_init_weights(init_cfg, init_seed, init_out);
  } catch (const ganc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
