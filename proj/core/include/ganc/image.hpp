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

#ifndef GANC_IMAGE_HPP_
#define GANC_IMAGE_HPP_

#include <cstddef>
#include <vector>

#include "ganc/error.hpp"

namespace ganc {

inline constexpr float kPixelMin = -0.5f;
inline constexpr float kPixelMax = 0.5f;

/// Three-channel image with pixel values in [-0.5, 0.5], stored row-major as
/// (y, x, channel). Values are clamped into range on construction.
class Image {
 public:
  Image() = default;

  Image(int height, int width)
      : height_(height), width_(width),
        data_(static_cast<std::size_t>(check_dims(height, width)) *
                  static_cast<std::size_t>(width) * 3,
              0.0f) {}

  Image(int height, int width, std::vector<float> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != static_cast<std::size_t>(height) * width * 3) {
      raise(ErrorKind::kShape, "image buffer size does not match " +
                                   std::to_string(height) + "x" +
                                   std::to_string(width) + "x3");
    }
    clamp_all();
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * width_;
  }

  float at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }

  /// Writes clamp into the valid range.
  void set(int y, int x, int c, float v) {
    data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c] = clamp_pixel(v);
  }

  const std::vector<float>& data() const { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  static float clamp_pixel(float v) {
    if (v < kPixelMin) return kPixelMin;
    if (v > kPixelMax) return kPixelMax;
    return v;
  }

 private:
  static int check_dims(int height, int width) {
    if (height < 1 || width < 1) {
      raise(ErrorKind::kShape, "image dimensions must be positive, got " +
                                   std::to_string(height) + "x" +
                                   std::to_string(width));
    }
    return height;
  }

  void clamp_all() {
    for (float& v : data_) v = clamp_pixel(v);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

inline void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    raise(ErrorKind::kShape,
          "image shape mismatch: " + std::to_string(a.height()) + "x" +
              std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
              "x" + std::to_string(b.width()));
  }
}

}  // namespace ganc

#endif  // GANC_IMAGE_HPP_
