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

#include "pren/error.hpp"

namespace pren {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kSymmetry: return "symmetry error";
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kDegenerate: return "degenerate-vector error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kLabel: return "label error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace pren
