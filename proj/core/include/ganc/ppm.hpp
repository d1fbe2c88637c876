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

#ifndef GANC_PPM_HPP_
#define GANC_PPM_HPP_

// Binary PPM (P6, maxval 255) image I/O. Bytes map to the pixel domain as
// v / 255 - 0.5 on read and round(clamp(v + 0.5) * 255) on write, so a file
// round-trips byte-exactly.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ganc/image.hpp"

namespace ganc {
namespace ppm {

Image decode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode(const Image& img);

Image read_file(const std::string& path);
void write_file(const Image& img, const std::string& path);

}  // namespace ppm
}  // namespace ganc

#endif  // GANC_PPM_HPP_
