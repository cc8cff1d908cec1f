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

// Label-embedding projections.
//
// Each ensemble member k sees the class attributes through its own
// orthonormal-row projection P_k (h x m). P_k maximizes the cosine-weighted
// association between every seen class and a random half of the unseen
// classes Z_k; the maximizer is the top-h eigenvectors of
//
//   B_k = sum_{i in S, j in Z_k} 1/2 A_ij (M_i M_j^T + M_j M_i^T),
//
// with A_ij the cosine similarity of attribute columns i and j.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pren/matrix.hpp"

namespace pren {

// Classes are identified 1..L throughout the library and its file formats.
using ClassId = int;

class ClassSplit {
 public:
  ClassSplit() = default;
  // Validates disjointness, coverage of 1..L and non-emptiness; ids are
  // stored sorted.
  ClassSplit(std::vector<ClassId> seen, std::vector<ClassId> unseen);

  const std::vector<ClassId>& seen() const noexcept { return seen_; }
  const std::vector<ClassId>& unseen() const noexcept { return unseen_; }
  std::size_t num_classes() const noexcept { return seen_.size() + unseen_.size(); }
  bool is_seen(ClassId c) const;
  bool is_unseen(ClassId c) const;

  friend bool operator==(const ClassSplit&, const ClassSplit&) = default;

 private:
  std::vector<ClassId> seen_;
  std::vector<ClassId> unseen_;
};

// m x L semantic attribute matrix, one column per class.
class AttributeMatrix {
 public:
  AttributeMatrix() = default;
  // Throws kDegenerate for a zero column, kValidation for non-finite entries.
  explicit AttributeMatrix(Matrix values);

  std::size_t dim() const noexcept { return values_.rows(); }
  std::size_t num_classes() const noexcept { return values_.cols(); }
  std::vector<double> column(ClassId c) const;
  const Matrix& values() const noexcept { return values_; }

  friend bool operator==(const AttributeMatrix&, const AttributeMatrix&) = default;

 private:
  Matrix values_;
};

struct ProjectionSet {
  std::size_t h = 0;
  std::size_t m = 0;
  std::vector<std::vector<ClassId>> subsets;  // Z_k, sorted ascending
  std::vector<Matrix> projections;            // P_k, h x m

  std::size_t size() const noexcept { return projections.size(); }
  // Number of subsets containing c.
  std::size_t coverage(ClassId c) const;

  friend bool operator==(const ProjectionSet&, const ProjectionSet&) = default;
};

enum class ProjectionMode {
  kEigen,     // top-h eigenvectors of the association matrix
  kIdentity,  // P = I (h = m): the original label embeddings
};

struct ProjectionOptions {
  std::size_t num_classifiers = 50;
  std::size_t h = 70;
  std::uint64_t seed = 0;
  ProjectionMode mode = ProjectionMode::kEigen;
  // Every Z_k is the full unseen set instead of a random half.
  bool full_unseen_subsets = false;
};

// ceil(L_u / 2), the subset size used for every Z_k.
std::size_t subset_size(std::size_t num_unseen);

// h = 70 when m > 70, otherwise ceil(0.8 m).
std::size_t default_projection_dim(std::size_t m);

// K random subsets of the unseen classes, each of size ceil(L_u/2), drawn
// without replacement. If some unseen class is left uncovered the whole list
// is redrawn from seed+1, seed+2, ... and after 100 attempts a
// kConfiguration error is thrown.
std::vector<std::vector<ClassId>> sample_subsets(const ClassSplit& split,
                                                 std::size_t k,
                                                 std::uint64_t seed);

// m x m association matrix for one subset; exactly symmetric.
Matrix build_association_matrix(const AttributeMatrix& attributes,
                                const ClassSplit& split,
                                std::span<const ClassId> subset);

// Rows are the top-h eigenvectors of b.
Matrix compute_projection(const Matrix& b, std::size_t h);

// tr(P B P^T).
double projection_objective(const Matrix& p, const Matrix& b);

ProjectionSet build_projection_set(const AttributeMatrix& attributes,
                                   const ClassSplit& split,
                                   const ProjectionOptions& options);

// Flat little-endian binary: u64 K, u64 h, u64 m, K x u64 subset sizes, the
// subset ids as u64, then every P_k row-major as f64.
void save_projection_set(const ProjectionSet& set,
                         const std::filesystem::path& path);
ProjectionSet load_projection_set(const std::filesystem::path& path);

}  // namespace pren
