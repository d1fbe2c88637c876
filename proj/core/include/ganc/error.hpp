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

#ifndef GANC_ERROR_HPP_
#define GANC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ganc {

/// Failure categories. The CLI maps these onto its exit codes, tests assert
/// on them, and messages carry the human-readable detail.
enum class ErrorKind {
  kShape,       // dimension / geometry mismatch
  kDomain,      // value outside the valid domain (bad token, bad probability)
  kFormat,      // malformed byte stream, bad magic / version
  kTruncation,  // byte stream ended early
  kIo,          // filesystem failure
  kBadArgument, // unusable call or command-line arguments
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ganc

#endif  // GANC_ERROR_HPP_
