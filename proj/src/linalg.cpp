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

#include "pren/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pren/error.hpp"

namespace pren {
namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kOffDiagonalTolerance = 1e-10;
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

double frobenius_norm(const Matrix& a) {
  double sum = 0.0;
  for (double x : a.data()) sum += x * x;
  return std::sqrt(sum);
}

// Apply the rotation that zeroes a(p, q): A <- J^T A J, V <- V J.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                              : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

void canonicalize_sign(std::vector<double>& u) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (std::abs(u[i]) > std::abs(u[best])) best = i;
  }
  if (u[best] < 0.0) {
    for (double& x : u) x = -x;
  }
}

}  // namespace

EigenResult sym_eig(const Matrix& input, std::size_t h) {
  require(input.square(), ErrorKind::kDimension,
          "sym_eig: matrix is " + std::to_string(input.rows()) + "x" +
              std::to_string(input.cols()));
  const std::size_t n = input.rows();
  require(h >= 1 && h <= n, ErrorKind::kArgument,
          "sym_eig: h=" + std::to_string(h) + " outside [1, " +
              std::to_string(n) + "]");
  require(input.all_finite(), ErrorKind::kArgument,
          "sym_eig: non-finite entry");

  double scale = 1.0;
  for (double x : input.data()) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      require(std::abs(input(i, j) - input(j, i)) <= kSymmetryTolerance * scale,
              ErrorKind::kSymmetry,
              "sym_eig: entries (" + std::to_string(i) + "," +
                  std::to_string(j) + ") differ from their transpose");
    }
  }

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
  }
  Matrix v = Matrix::identity(n);

  const double tolerance = kOffDiagonalTolerance * std::max(1.0, frobenius_norm(a));
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) < tolerance) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x) > a(y, y);
  });

  EigenResult result;
  result.values.reserve(h);
  result.vectors.reserve(h);
  for (std::size_t i = 0; i < h; ++i) {
    result.values.push_back(a(order[i], order[i]));
    std::vector<double> u = v.column(order[i]);
    canonicalize_sign(u);
    result.vectors.push_back(std::move(u));
  }
  return result;
}

double norm2(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::kDimension,
          "cosine_similarity: length mismatch");
  const double na = norm2(a);
  const double nb = norm2(b);
  require(na > 0.0 && nb > 0.0, ErrorKind::kDegenerate,
          "cosine_similarity: zero-norm vector");
  double inner = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) inner += a[i] * b[i];
  return std::clamp(inner / (na * nb), -1.0, 1.0);
}

}  // namespace pren
