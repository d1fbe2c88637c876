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

#include "jpeg_codec.hpp"

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>

#include <jpeglib.h>

#include "ganc/error.hpp"

namespace ganc {
namespace tools {

namespace {

// libjpeg's default error handler exits the process; this one returns
// control via longjmp so failures surface as exceptions instead.
struct JumpErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void error_exit_jump(j_common_ptr cinfo) {
  std::longjmp(reinterpret_cast<JumpErrorMgr*>(cinfo->err)->jump, 1);
}

std::vector<std::uint8_t> rgb_bytes_of(const Image& img) {
  std::vector<std::uint8_t> rgb(img.pixel_count() * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::size_t base =
          (static_cast<std::size_t>(y) * img.width() + x) * 3;
      for (int c = 0; c < 3; ++c) {
        const double v = (static_cast<double>(img.at(y, x, c)) + 0.5) * 255.0;
        const long q = std::lround(v);
        rgb[base + c] =
            static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
      }
    }
  }
  return rgb;
}

}  // namespace

std::vector<std::uint8_t> jpeg_encode(const Image& img, int quality) {
  if (quality < 1 || quality > 100) {
    raise(ErrorKind::kBadArgument, "jpeg_encode: quality must be in [1, 100]");
  }
  const std::vector<std::uint8_t> rgb = rgb_bytes_of(img);

  jpeg_compress_struct cinfo;
  JumpErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = error_exit_jump;

  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (buffer) std::free(buffer);
    raise(ErrorKind::kFormat, "jpeg_encode: compression failed");
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(rgb.data() +
                                        cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<std::uint8_t> out(buffer, buffer + buffer_size);
  std::free(buffer);
  return out;
}

Image jpeg_decode(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JumpErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = error_exit_jump;

  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    raise(ErrorKind::kFormat, "jpeg_decode: not a decodable JPEG");
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(width) * 3;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(height) * stride);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  Image img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t base = static_cast<std::size_t>(y) * stride +
                               static_cast<std::size_t>(x) * 3;
      for (int c = 0; c < 3; ++c) {
        img.set(y, x, c, static_cast<float>(rgb[base + c]) / 255.0f - 0.5f);
      }
    }
  }
  return img;
}

}  // namespace tools
}  // namespace ganc
