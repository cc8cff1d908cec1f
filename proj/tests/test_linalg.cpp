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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pren/linalg.hpp"
#include "pren/matrix.hpp"
#include "test_util.hpp"

using namespace pren;
using namespace pren::testing;

TEST_SUITE("linalg") {

TEST_CASE("matrix basics") {
  Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(a(1, 0) == 4);
  CHECK(a.transposed()(2, 1) == 6);
  CHECK(a.column(1) == std::vector<double>{2, 5});
  const Matrix p = a * a.transposed();
  CHECK(p == Matrix(2, 2, {14, 32, 32, 77}));
  CHECK_ERROR_KIND((Matrix(2, 2, {1, 2, 3})), ErrorKind::kDimension);
  CHECK_ERROR_KIND(a * a, ErrorKind::kDimension);
  Matrix grow;
  grow.append_row(std::vector<double>{1, 2});
  grow.append_row(std::vector<double>{3, 4});
  CHECK(grow == Matrix(2, 2, {1, 2, 3, 4}));
  CHECK_ERROR_KIND((grow.append_row(std::vector<double>{1})), ErrorKind::kDimension);
}

TEST_CASE("diagonal input returns its entries sorted") {
  const std::vector<double> d{0.5, -2.0, 3.0, 1.0};
  const EigenResult r = sym_eig(Matrix::diagonal(d), 4);
  CHECK(r.values == std::vector<double>{3.0, 1.0, 0.5, -2.0});
  CHECK(r.vectors[0] == std::vector<double>{0, 0, 1, 0});
}

TEST_CASE("eigenpairs match the power-iteration oracle") {
  std::mt19937_64 gen(42);
  for (std::size_t n = 2; n <= 9; ++n) {
    const Matrix a = random_symmetric(n, gen);
    const EigenResult r = sym_eig(a, n);
    const std::vector<double> oracle = power_eigenvalues(a, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(r.values[i] - oracle[i]) < 1e-6);
      double residual = 0.0;
      for (std::size_t row = 0; row < n; ++row) {
        double au = 0.0;
        for (std::size_t c = 0; c < n; ++c) au += a(row, c) * r.vectors[i][c];
        residual = std::max(residual, std::abs(au - r.values[i] * r.vectors[i][row]));
      }
      CHECK(residual < 1e-7);
    }
  }
}

TEST_CASE("eigenvectors are orthonormal with the sign convention applied") {
  std::mt19937_64 gen(3);
  const Matrix a = random_symmetric(7, gen);
  const EigenResult r = sym_eig(a, 5);
  REQUIRE(r.vectors.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < 7; ++c) d += r.vectors[i][c] * r.vectors[j][c];
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
    std::size_t big = 0;
    for (std::size_t c = 1; c < 7; ++c) {
      if (std::abs(r.vectors[i][c]) > std::abs(r.vectors[i][big]) + 1e-12) big = c;
    }
    CHECK(r.vectors[i][big] > 0.0);
  }
}

TEST_CASE("negating the input negates and reverses the spectrum") {
  std::mt19937_64 gen(8);
  Matrix a = random_symmetric(6, gen);
  const EigenResult r = sym_eig(a, 6);
  for (double& x : a.data()) x = -x;
  const EigenResult s = sym_eig(a, 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(s.values[i] == doctest::Approx(-r.values[5 - i]));
}

TEST_CASE("input validation") {
  CHECK_ERROR_KIND(sym_eig(Matrix(2, 3), 1), ErrorKind::kDimension);
  CHECK_ERROR_KIND(sym_eig(Matrix(3, 3), 0), ErrorKind::kArgument);
  CHECK_ERROR_KIND((sym_eig(Matrix(2, 2, {1, 2, 3, 1}), 1)), ErrorKind::kSymmetry);
  CHECK_ERROR_KIND(sym_eig(Matrix(3, 3), 4), ErrorKind::kArgument);
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 0, 1}, b{2, 0, 2}, c{0, 1, 0}, zero{0, 0, 0};
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, c) == 0.0);
  CHECK(cosine_similarity(a, b) <= 1.0);
  CHECK_ERROR_KIND(cosine_similarity(a, zero), ErrorKind::kDegenerate);
  CHECK_ERROR_KIND((cosine_similarity(a, std::vector<double>{1, 2})), ErrorKind::kDimension);
}

}  // TEST_SUITE
