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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace pren {

// Writes to "<path>.tmp" and renames over path.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);
// Full-string parse; throws kValidation naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

// Little-endian binary encoder/decoder for the checkpoint formats.
class BinaryWriter {
 public:
  void u64(std::uint64_t x);
  void f64(double x);
  void f64s(std::span<const double> xs);
  const std::string& bytes() const noexcept { return out_; }

 private:
  std::string out_;
};

class BinaryReader {
 public:
  BinaryReader(std::string bytes, std::string source)
      : in_(std::move(bytes)), source_(std::move(source)) {}

  std::uint64_t u64();
  double f64();
  void f64s(std::span<double> out);
  bool at_end() const noexcept { return pos_ == in_.size(); }
  // Throws kValidation unless every byte has been consumed.
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::string in_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace pren
