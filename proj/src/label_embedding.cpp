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

#include "pren/label_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pren/error.hpp"
#include "pren/fileio.hpp"
#include "pren/linalg.hpp"
#include "pren/rng.hpp"

namespace pren {
namespace {

constexpr int kCoverageAttempts = 100;

bool contains(const std::vector<ClassId>& sorted, ClassId c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

}  // namespace

ClassSplit::ClassSplit(std::vector<ClassId> seen, std::vector<ClassId> unseen)
    : seen_(std::move(seen)), unseen_(std::move(unseen)) {
  std::sort(seen_.begin(), seen_.end());
  std::sort(unseen_.begin(), unseen_.end());
  require(!seen_.empty() && !unseen_.empty(), ErrorKind::kValidation,
          "class split needs at least one seen and one unseen class");
  std::vector<ClassId> all = seen_;
  all.insert(all.end(), unseen_.begin(), unseen_.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    require(all[i] == static_cast<ClassId>(i + 1), ErrorKind::kValidation,
            "class split must partition 1.." + std::to_string(all.size()) +
                " (class " + std::to_string(all[i]) + " repeated or out of range)");
  }
}

bool ClassSplit::is_seen(ClassId c) const { return contains(seen_, c); }
bool ClassSplit::is_unseen(ClassId c) const { return contains(unseen_, c); }

AttributeMatrix::AttributeMatrix(Matrix values) : values_(std::move(values)) {
  require(values_.all_finite(), ErrorKind::kValidation,
          "attribute matrix has a non-finite entry");
  for (std::size_t c = 0; c < values_.cols(); ++c) {
    const std::vector<double> col = values_.column(c);
    require(norm2(col) > 0.0, ErrorKind::kDegenerate,
            "attribute vector of class " + std::to_string(c + 1) + " is all zero");
  }
}

std::vector<double> AttributeMatrix::column(ClassId c) const {
  require(c >= 1 && static_cast<std::size_t>(c) <= num_classes(), ErrorKind::kLabel,
          "class " + std::to_string(c) + " outside 1.." + std::to_string(num_classes()));
  return values_.column(static_cast<std::size_t>(c - 1));
}

std::size_t ProjectionSet::coverage(ClassId c) const {
  return static_cast<std::size_t>(std::count_if(
      subsets.begin(), subsets.end(),
      [c](const std::vector<ClassId>& z) { return contains(z, c); }));
}

std::size_t subset_size(std::size_t num_unseen) { return (num_unseen + 1) / 2; }

std::size_t default_projection_dim(std::size_t m) {
  if (m > 70) return 70;
  return static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(m)));
}

std::vector<std::vector<ClassId>> sample_subsets(const ClassSplit& split,
                                                 std::size_t k,
                                                 std::uint64_t seed) {
  require(k >= 1, ErrorKind::kArgument, "sample_subsets: K must be at least 1");
  const std::vector<ClassId>& unseen = split.unseen();
  require(unseen.size() >= 2, ErrorKind::kArgument,
          "sample_subsets: need at least two unseen classes");
  const std::size_t size = subset_size(unseen.size());

  for (int attempt = 0; attempt < kCoverageAttempts; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<std::vector<ClassId>> subsets;
    subsets.reserve(k);
    std::vector<int> covered(unseen.size(), 0);
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<std::size_t> pool(unseen.size());
      for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
      // Partial Fisher-Yates: the first `size` slots are a uniform sample.
      for (std::size_t i = 0; i < size; ++i) {
        const std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      std::vector<ClassId> z;
      z.reserve(size);
      for (std::size_t i = 0; i < size; ++i) {
        z.push_back(unseen[pool[i]]);
        covered[pool[i]] = 1;
      }
      std::sort(z.begin(), z.end());
      subsets.push_back(std::move(z));
    }
    if (std::all_of(covered.begin(), covered.end(), [](int x) { return x != 0; })) {
      return subsets;
    }
  }
  fail(ErrorKind::kConfiguration,
       "cannot cover all " + std::to_string(unseen.size()) + " unseen classes with K=" +
           std::to_string(k) + " subsets of size " + std::to_string(size) +
           " after " + std::to_string(kCoverageAttempts) + " draws");
}

Matrix build_association_matrix(const AttributeMatrix& attributes,
                                const ClassSplit& split,
                                std::span<const ClassId> subset) {
  require(attributes.num_classes() == split.num_classes(), ErrorKind::kDimension,
          "attribute matrix has " + std::to_string(attributes.num_classes()) +
              " classes, split has " + std::to_string(split.num_classes()));
  for (ClassId j : subset) {
    require(split.is_unseen(j), ErrorKind::kArgument,
            "subset member " + std::to_string(j) + " is not an unseen class");
  }
  const std::size_t m = attributes.dim();
  std::vector<std::vector<double>> seen_columns;
  seen_columns.reserve(split.seen().size());
  for (ClassId i : split.seen()) seen_columns.push_back(attributes.column(i));

  // C = sum_j (sum_i A_ij M_i) M_j^T, then B = (C + C^T) / 2.
  Matrix c(m, m);
  std::vector<double> weighted(m);
  for (ClassId j : subset) {
    const std::vector<double> mj = attributes.column(j);
    std::fill(weighted.begin(), weighted.end(), 0.0);
    for (const std::vector<double>& mi : seen_columns) {
      const double a = cosine_similarity(mi, mj);
      for (std::size_t r = 0; r < m; ++r) weighted[r] += a * mi[r];
    }
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t s = 0; s < m; ++s) c(r, s) += weighted[r] * mj[s];
    }
  }
  Matrix b(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < m; ++s) b(r, s) = 0.5 * (c(r, s) + c(s, r));
  }
  return b;
}

Matrix compute_projection(const Matrix& b, std::size_t h) {
  require(b.square(), ErrorKind::kDimension, "compute_projection: B is not square");
  require(h >= 1 && h <= b.rows(), ErrorKind::kArgument,
          "compute_projection: h=" + std::to_string(h) + " exceeds m=" +
              std::to_string(b.rows()));
  const EigenResult eig = sym_eig(b, h);
  Matrix p(h, b.rows());
  for (std::size_t r = 0; r < h; ++r) {
    std::copy(eig.vectors[r].begin(), eig.vectors[r].end(), p.row(r).begin());
  }
  return p;
}

double projection_objective(const Matrix& p, const Matrix& b) {
  const Matrix pbpt = p * b * p.transposed();
  double trace = 0.0;
  for (std::size_t i = 0; i < pbpt.rows(); ++i) trace += pbpt(i, i);
  return trace;
}

ProjectionSet build_projection_set(const AttributeMatrix& attributes,
                                   const ClassSplit& split,
                                   const ProjectionOptions& options) {
  const std::size_t m = attributes.dim();
  require(options.num_classifiers >= 1, ErrorKind::kArgument,
          "projection set needs K >= 1");
  ProjectionSet set;
  set.m = m;
  set.h = options.mode == ProjectionMode::kIdentity ? m : options.h;
  require(set.h >= 1 && set.h <= m, ErrorKind::kArgument,
          "projection dimension h=" + std::to_string(set.h) + " must be in [1, m=" +
              std::to_string(m) + "]");

  if (options.full_unseen_subsets) {
    set.subsets.assign(options.num_classifiers, split.unseen());
  } else {
    set.subsets = sample_subsets(split, options.num_classifiers, options.seed);
  }

  set.projections.reserve(set.subsets.size());
  for (const std::vector<ClassId>& z : set.subsets) {
    if (options.mode == ProjectionMode::kIdentity) {
      set.projections.push_back(Matrix::identity(m));
    } else {
      set.projections.push_back(
          compute_projection(build_association_matrix(attributes, split, z), set.h));
    }
  }
  return set;
}

void save_projection_set(const ProjectionSet& set, const std::filesystem::path& path) {
  BinaryWriter w;
  w.u64(set.size());
  w.u64(set.h);
  w.u64(set.m);
  for (const auto& z : set.subsets) w.u64(z.size());
  for (const auto& z : set.subsets) {
    for (ClassId c : z) w.u64(static_cast<std::uint64_t>(c));
  }
  for (const Matrix& p : set.projections) w.f64s(p.data());
  write_file_atomic(path, w.bytes());
}

ProjectionSet load_projection_set(const std::filesystem::path& path) {
  BinaryReader r(read_file(path), path.string());
  ProjectionSet set;
  const std::uint64_t k = r.u64();
  set.h = r.u64();
  set.m = r.u64();
  require(k >= 1 && k < (1u << 20) && set.h >= 1 && set.h <= set.m && set.m < (1u << 20),
          ErrorKind::kValidation, path.string() + ": implausible projection header");
  std::vector<std::uint64_t> sizes(k);
  for (auto& s : sizes) s = r.u64();
  set.subsets.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    require(sizes[i] < (1u << 20), ErrorKind::kValidation,
            path.string() + ": implausible subset size");
    for (std::uint64_t j = 0; j < sizes[i]; ++j) {
      set.subsets[i].push_back(static_cast<ClassId>(r.u64()));
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    Matrix p(set.h, set.m);
    r.f64s(p.data());
    set.projections.push_back(std::move(p));
  }
  r.expect_end();
  return set;
}

}  // namespace pren
