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

#include <cstddef>
#include <span>
#include <vector>

#include "pren/matrix.hpp"

namespace pren {

struct EigenResult {
  std::vector<double> values;           // non-increasing
  std::vector<std::vector<double>> vectors;  // unit norm, one per value
};

// Top-h eigenpairs of a symmetric matrix by cyclic Jacobi rotations.
//
// Throws kDimension for non-square input, kSymmetry if any |a_ij - a_ji|
// exceeds 1e-9 * max(1, max|a|), and kArgument unless 1 <= h <= n.
//
// Each eigenvector is signed so that its first entry of largest magnitude is
// positive. Within a repeated eigenvalue the basis is arbitrary.
EigenResult sym_eig(const Matrix& a, std::size_t h);

// <a, b> / (|a| |b|), clamped to [-1, 1]. Throws kDegenerate on a zero-norm
// argument and kDimension on a length mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double norm2(std::span<const double> v);

}  // namespace pren
