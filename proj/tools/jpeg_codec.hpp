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

#ifndef GANC_TOOLS_JPEG_CODEC_HPP_
#define GANC_TOOLS_JPEG_CODEC_HPP_

// In-memory baseline JPEG adapter over libjpeg, the pluggable fallback
// codec for the container format. Image values map to bytes through the
// same v/255 - 0.5 convention as the PPM reader.

#include <cstdint>
#include <span>
#include <vector>

#include "ganc/image.hpp"

namespace ganc {
namespace tools {

/// Baseline JPEG at the given quality (1..100). Raises kFormat on encoder
/// failure.
std::vector<std::uint8_t> jpeg_encode(const Image& img, int quality);

/// Decodes a baseline JPEG into the pixel domain. Raises kFormat when the
/// bytes are not a decodable JPEG.
Image jpeg_decode(std::span<const std::uint8_t> bytes);

}  // namespace tools
}  // namespace ganc

#endif  // GANC_TOOLS_JPEG_CODEC_HPP_
