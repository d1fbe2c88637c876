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

#include "ganc/ppm.hpp"

#include <cmath>
#include <cstdio>

#include "ganc/error.hpp"

namespace ganc {
namespace ppm {

namespace {

/// Whitespace-and-comment-aware header token reader. PPM comments run from
/// '#' to end of line and may appear between any header tokens.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_separators();
    std::string t;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) {
      t += static_cast<char>(bytes_[pos_++]);
    }
    if (t.empty()) {
      raise(ErrorKind::kTruncation, "ppm: truncated header");
    }
    return t;
  }

  int number() {
    const std::string t = token();
    int v = 0;
    for (char c : t) {
      if (c < '0' || c > '9') {
        raise(ErrorKind::kFormat, "ppm: bad header number '" + t + "'");
      }
      if (v > 6553) {
        raise(ErrorKind::kFormat, "ppm: header number '" + t + "' too large");
      }
      v = v * 10 + (c - '0');
    }
    return v;
  }

  /// Consumes the single whitespace byte separating header and raster.
  void finish_header() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      raise(ErrorKind::kFormat, "ppm: missing raster separator");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

 private:
  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode(std::span<const std::uint8_t> bytes) {
  HeaderReader header(bytes);
  const std::string magic = header.token();
  if (magic != "P6") {
    raise(ErrorKind::kFormat, "ppm: expected magic P6, got '" + magic + "'");
  }
  const int width = header.number();
  const int height = header.number();
  const int maxval = header.number();
  if (width < 1 || height < 1) {
    raise(ErrorKind::kFormat, "ppm: non-positive dimensions");
  }
  if (maxval != 255) {
    raise(ErrorKind::kFormat,
          "ppm: only maxval 255 is supported, got " + std::to_string(maxval));
  }
  header.finish_header();
  const std::span<const std::uint8_t> raster = header.rest();
  const std::size_t expected =
      static_cast<std::size_t>(width) * height * 3;
  if (raster.size() < expected) {
    raise(ErrorKind::kTruncation,
          "ppm: raster holds " + std::to_string(raster.size()) +
              " bytes, expected " + std::to_string(expected));
  }
  Image img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * width + x) * 3;
      for (int c = 0; c < 3; ++c) {
        img.set(y, x, c,
                static_cast<float>(raster[base + c]) / 255.0f - 0.5f);
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode(const Image& img) {
  std::string header = "P6\n" + std::to_string(img.width()) + " " +
                       std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.pixel_count() * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = (static_cast<double>(img.at(y, x, c)) + 0.5) * 255.0;
        const long q = std::lround(v);
        out.push_back(static_cast<std::uint8_t>(
            q < 0 ? 0 : (q > 255 ? 255 : q)));
      }
    }
  }
  return out;
}

Image read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    raise(ErrorKind::kIo, "ppm: cannot open '" + path + "'");
  }
  std::vector<std::uint8_t> bytes;
  std::uint8_t buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) {
    bytes.insert(bytes.end(), buf, buf + n);
  }
  const bool read_error = std::ferror(f) != 0;
  std::fclose(f);
  if (read_error) {
    raise(ErrorKind::kIo, "ppm: read failure on '" + path + "'");
  }
  return decode(bytes);
}

void write_file(const Image& img, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode(img);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    raise(ErrorKind::kIo, "ppm: cannot open '" + path + "' for writing");
  }
  const std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  const int close_rc = std::fclose(f);
  if (written != bytes.size() || close_rc != 0) {
    raise(ErrorKind::kIo, "ppm: short write to '" + path + "'");
  }
}

}  // namespace ppm
}  // namespace ganc
