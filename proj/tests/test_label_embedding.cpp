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


#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "pren/fileio.hpp"
#include "pren/label_embedding.hpp"
#include "pren/linalg.hpp"
#include "test_util.hpp"

using namespace pren;
using namespace pren::testing;

TEST_SUITE("label_embedding") {

TEST_CASE("subset and projection sizes") {
  CHECK(subset_size(5) == 3);
  CHECK(subset_size(4) == 2);
  CHECK(subset_size(2) == 1);
  CHECK(default_projection_dim(85) == 70);
  CHECK(default_projection_dim(312) == 70);
  CHECK(default_projection_dim(70) == 56);
  CHECK(default_projection_dim(20) == 16);
  CHECK(default_projection_dim(2) == 2);
}

TEST_CASE("class split validation") {
  const ClassSplit s({3, 1}, {2, 4});
  CHECK(s.seen() == std::vector<ClassId>{1, 3});
  CHECK(s.is_unseen(4));
  CHECK_FALSE(s.is_seen(4));
  CHECK_ERROR_KIND((ClassSplit({1, 2}, {2, 3})), ErrorKind::kValidation);
  CHECK_ERROR_KIND((ClassSplit({1}, {3})), ErrorKind::kValidation);
  CHECK_ERROR_KIND((ClassSplit({1, 2}, {})), ErrorKind::kValidation);
}

TEST_CASE("attribute matrix rejects a zero column") {
  Matrix m(3, 2, 1.0);
  m(0, 1) = m(1, 1) = m(2, 1) = 0.0;
  CHECK_ERROR_KIND(AttributeMatrix(m), ErrorKind::kDegenerate);
  const AttributeMatrix ok(Matrix(3, 2, 1.0));
  CHECK_ERROR_KIND(ok.column(3), ErrorKind::kLabel);
}

TEST_CASE("sampled subsets have the right shape and cover every unseen class") {
  const ClassSplit split = first_seen_split(12, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto subsets = sample_subsets(split, 6, seed);
    REQUIRE(subsets.size() == 6);
    std::set<ClassId> covered;
    for (const auto& z : subsets) {
      CHECK(z.size() == 4);
      CHECK(std::is_sorted(z.begin(), z.end()));
      CHECK(std::adjacent_find(z.begin(), z.end()) == z.end());
      for (ClassId c : z) CHECK(split.is_unseen(c));
      covered.insert(z.begin(), z.end());
    }
    CHECK(covered.size() == 7);
    CHECK(sample_subsets(split, 6, seed) == subsets);
  }
}

TEST_CASE("impossible coverage is a configuration error") {
  const ClassSplit split = first_seen_split(6, 2);  // 4 unseen, subsets of 2
  CHECK_ERROR_KIND(sample_subsets(split, 1, 0), ErrorKind::kConfiguration);
}

TEST_CASE("association matrix matches the naive double loop") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    const AttributeMatrix attrs = random_attributes(6, 9, gen);
    const ClassSplit split = first_seen_split(9, 5);
    const std::vector<ClassId> subset{6, 8};
    const Matrix b = build_association_matrix(attrs, split, subset);
    CHECK(max_abs_diff(b, naive_association(attrs, split, subset)) < 1e-12);
    CHECK(max_abs_diff(b, b.transposed()) == 0.0);
  }
}

TEST_CASE("association matrix rejects seen classes in the subset") {
  std::mt19937_64 gen(1);
  const AttributeMatrix attrs = random_attributes(4, 5, gen);
  const std::vector<ClassId> subset{1, 4};
  CHECK_ERROR_KIND(build_association_matrix(attrs, first_seen_split(5, 3), subset),
                   ErrorKind::kArgument);
}

TEST_CASE("projection attains the top eigenvalue sum and beats random frames") {
  std::mt19937_64 gen(23);
  const AttributeMatrix attrs = random_attributes(8, 10, gen);
  const ClassSplit split = first_seen_split(10, 6);
  const std::vector<ClassId> subset{7, 9};
  const Matrix b = build_association_matrix(attrs, split, subset);
  const std::size_t h = 3;
  const Matrix p = compute_projection(b, h);
  const Matrix ppt = p * p.transposed();
  CHECK(max_abs_diff(ppt, Matrix::identity(h)) < 1e-10);

  const EigenResult eig = sym_eig(b, h);
  const double best = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  CHECK(projection_objective(p, b) == doctest::Approx(best).epsilon(1e-9));
  CHECK(naive_trace_objective(p, b) == doctest::Approx(best).epsilon(1e-9));
  for (int i = 0; i < 200; ++i) {
    const Matrix q = random_orthonormal_rows(h, 8, gen);
    CHECK(naive_trace_objective(q, b) <= best + 1e-9);
  }
}

TEST_CASE("projection set modes") {
  std::mt19937_64 gen(4);
  const AttributeMatrix attrs = random_attributes(6, 8, gen);
  const ClassSplit split = first_seen_split(8, 4);
  ProjectionOptions options;
  options.num_classifiers = 5;
  options.h = 3;
  options.seed = 9;

  const ProjectionSet eig = build_projection_set(attrs, split, options);
  CHECK(eig.size() == 5);
  CHECK(eig.h == 3);
  CHECK(eig.m == 6);
  for (ClassId c : split.unseen()) CHECK(eig.coverage(c) >= 1);
  CHECK(eig.subsets == sample_subsets(split, 5, 9));

  options.mode = ProjectionMode::kIdentity;
  const ProjectionSet id = build_projection_set(attrs, split, options);
  CHECK(id.h == 6);
  for (const Matrix& p : id.projections) CHECK(p == Matrix::identity(6));
  CHECK(id.subsets == eig.subsets);

  options.full_unseen_subsets = true;
  options.num_classifiers = 1;
  const ProjectionSet single = build_projection_set(attrs, split, options);
  REQUIRE(single.size() == 1);
  CHECK(single.subsets[0] == split.unseen());

  options.mode = ProjectionMode::kEigen;
  options.h = 7;
  CHECK_ERROR_KIND(build_projection_set(attrs, split, options), ErrorKind::kArgument);
}

TEST_CASE("projection set file round trip") {
  std::mt19937_64 gen(6);
  const AttributeMatrix attrs = random_attributes(5, 7, gen);
  ProjectionOptions options;
  options.num_classifiers = 4;
  options.h = 2;
  const ProjectionSet set = build_projection_set(attrs, first_seen_split(7, 3), options);
  TempDir dir("proj");
  save_projection_set(set, dir / "p.bin");
  CHECK(load_projection_set(dir / "p.bin") == set);

  std::string bytes = read_file(dir / "p.bin");
  write_file_atomic(dir / "short.bin", bytes.substr(0, bytes.size() - 3));
  CHECK_ERROR_KIND(load_projection_set(dir / "short.bin"), ErrorKind::kValidation);
  write_file_atomic(dir / "long.bin", bytes + "x");
  CHECK_ERROR_KIND(load_projection_set(dir / "long.bin"), ErrorKind::kValidation);
}

}  // TEST_SUITE
