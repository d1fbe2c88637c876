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

#include "ganc/weights.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "ganc/error.hpp"
#include "bytes.hpp"

namespace ganc {

namespace {

constexpr std::uint8_t kMagic[4] = {0x47, 0x41, 0x4E, 0x57};  // "GANW"
constexpr std::uint8_t kVersion = 1;

std::string dims_to_string(std::span<const std::uint32_t> dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

}  // namespace

const Tensor& ModelWeights::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    raise(ErrorKind::kFormat, "weights: missing tensor '" + name + "'");
  }
  return it->second;
}

const Tensor& ModelWeights::get(
    const std::string& name,
    std::span<const std::uint32_t> expected_dims) const {
  const Tensor& t = get(name);
  const bool match =
      t.dims.size() == expected_dims.size() &&
      std::equal(t.dims.begin(), t.dims.end(), expected_dims.begin());
  if (!match) {
    raise(ErrorKind::kShape, "weights: tensor '" + name + "' has dims " +
                                 dims_to_string(t.dims) + ", expected " +
                                 dims_to_string(expected_dims));
  }
  return t;
}

void ModelWeights::put(const std::string& name, Tensor tensor) {
  if (name.empty() || name.size() > 0xFFFF) {
    raise(ErrorKind::kBadArgument, "weights: tensor name length invalid");
  }
  if (tensor.dims.size() > 0xFF) {
    raise(ErrorKind::kBadArgument,
          "weights: tensor '" + name + "' has too many dimensions");
  }
  if (tensor.data.size() != tensor.element_count()) {
    raise(ErrorKind::kShape, "weights: tensor '" + name + "' buffer has " +
                                 std::to_string(tensor.data.size()) +
                                 " elements, dims imply " +
                                 std::to_string(tensor.element_count()));
  }
  tensors_[name] = std::move(tensor);
}

void ModelWeights::put_scalar(const std::string& name, float value) {
  put(name, Tensor{{1}, {value}});
}

float ModelWeights::get_scalar(const std::string& name) const {
  const Tensor& t = get(name);
  if (t.data.size() != 1) {
    raise(ErrorKind::kShape,
          "weights: tensor '" + name + "' is not a scalar");
  }
  return t.data[0];
}

std::vector<std::uint8_t> ModelWeights::to_bytes() const {
  if (tensors_.size() > 0xFFFFFFFFull) {
    raise(ErrorKind::kFormat, "weights: too many tensors");
  }
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  detail::put_u8(out, kVersion);
  detail::put_u32le(out, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& [name, tensor] : tensors_) {
    detail::put_u16le(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    detail::put_u8(out, static_cast<std::uint8_t>(tensor.dims.size()));
    for (std::uint32_t d : tensor.dims) detail::put_u32le(out, d);
    for (float v : tensor.data) detail::put_f32le(out, v);
  }
  return out;
}

ModelWeights ModelWeights::from_bytes(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  std::uint8_t magic[4];
  for (auto& b : magic) b = in.u8("weights header");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    raise(ErrorKind::kFormat, "weights: bad magic");
  }
  const std::uint8_t version = in.u8("weights header");
  if (version != kVersion) {
    raise(ErrorKind::kFormat,
          "weights: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = in.u32le("weights header");
  ModelWeights w;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = in.u16le("tensor name length");
    if (name_len == 0) {
      raise(ErrorKind::kFormat, "weights: empty tensor name");
    }
    const auto name_bytes = in.take(name_len, "tensor name");
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::uint8_t ndim = in.u8("tensor rank");
    Tensor t;
    t.dims.resize(ndim);
    std::uint64_t elements = 1;
    for (auto& d : t.dims) {
      d = in.u32le("tensor dims");
      elements *= d;
      if (elements > (1ull << 32)) {
        raise(ErrorKind::kFormat,
              "weights: tensor '" + name + "' is implausibly large");
      }
    }
    t.data.resize(static_cast<std::size_t>(elements));
    for (auto& v : t.data) v = in.f32le("tensor data");
    if (w.has(name)) {
      raise(ErrorKind::kFormat, "weights: duplicate tensor '" + name + "'");
    }
    w.put(name, std::move(t));
  }
  return w;
}

void ModelWeights::save(const std::string& path) const {
  const std::vector<std::uint8_t> bytes = to_bytes();
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    raise(ErrorKind::kIo, "weights: cannot open '" + path + "' for writing");
  }
  const std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  const int close_rc = std::fclose(f);
  if (written != bytes.size() || close_rc != 0) {
    raise(ErrorKind::kIo, "weights: short write to '" + path + "'");
  }
}

ModelWeights ModelWeights::load(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    raise(ErrorKind::kIo, "weights: cannot open '" + path + "'");
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
    raise(ErrorKind::kIo, "weights: read failure on '" + path + "'");
  }
  return from_bytes(bytes);
}

}  // namespace ganc
