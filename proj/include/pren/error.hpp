// Copyright 2026 The pren Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pren {

enum class ErrorKind {
  kDimension,      // shape / size mismatch
  kSymmetry,       // matrix expected symmetric
  kArgument,       // parameter out of range
  kDegenerate,     // zero-norm vector where a direction is required
  kConfiguration,  // unusable configuration (e.g. uncovered unseen class)
  kLabel,          // class label outside 1..L
  kData,           // empty or inconsistent dataset
  kValidation,     // malformed input file
  kIo,             // filesystem failure
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; the kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace pren
