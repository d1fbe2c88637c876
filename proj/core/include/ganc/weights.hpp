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

#ifndef GANC_WEIGHTS_HPP_
#define GANC_WEIGHTS_HPP_

// Named-tensor store and its on-disk format "GANW":
//   magic 47 41 4E 57 | version u8=1 | tensor count u32 LE | per tensor:
//   name length u16 LE | name bytes | ndim u8 | dims u32 LE each |
//   data f32 LE row-major.
// The loader rejects unknown magic or version. Tensors are kept in a sorted
// map so serialization order is deterministic.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ganc {

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (std::uint32_t d : dims) n *= d;
    return n;
  }
};

class ModelWeights {
 public:
  ModelWeights() = default;

  bool has(const std::string& name) const {
    return tensors_.count(name) != 0;
  }

  /// Raises kFormat when the tensor is missing.
  const Tensor& get(const std::string& name) const;

  /// get() plus a dimension check; raises kShape on mismatch.
  const Tensor& get(const std::string& name,
                    std::span<const std::uint32_t> expected_dims) const;

  /// Inserts or replaces. The buffer size must match the dims product.
  void put(const std::string& name, Tensor tensor);

  /// Convenience for scalar configuration entries stored as 1-element
  /// tensors (for example head counts).
  void put_scalar(const std::string& name, float value);
  float get_scalar(const std::string& name) const;

  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  std::size_t size() const { return tensors_.size(); }

  std::vector<std::uint8_t> to_bytes() const;
  static ModelWeights from_bytes(std::span<const std::uint8_t> bytes);

  void save(const std::string& path) const;
  static ModelWeights load(const std::string& path);

 private:
  std::map<std::string, Tensor> tensors_;
};

}  // namespace ganc

#endif  // GANC_WEIGHTS_HPP_
