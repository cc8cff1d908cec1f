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
#include <vector>

#include "pren/error.hpp"
#include "pren/simd/kernels.hpp"

using namespace pren;
using namespace pren::simd;

namespace {

std::vector<double> randoms(std::size_t n, std::mt19937_64& gen, double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> z(0.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = z(gen) < zero_fraction ? 0.0 : u(gen);
  return out;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= tol * std::max(1.0, std::abs(a[i])));
  }
}

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (const KernelTable* t = kernels_for(isa)) out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table is always available") {
  CHECK(kernels_for(Isa::kScalar) == &scalar_kernels());
  CHECK(scalar_kernels().isa == Isa::kScalar);
  CHECK(isa_name(Isa::kAvx2) == "avx2");
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 gen(11);
  for (const KernelTable* t : vector_tables()) {
    CAPTURE(isa_name(t->isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 67u}) {
      CAPTURE(n);
      const auto a = randoms(n, gen);
      const auto b = randoms(n, gen);
      const double d_ref = ref.dot(a.data(), b.data(), n);
      const double d_vec = t->dot(a.data(), b.data(), n);
      CHECK(std::abs(d_ref - d_vec) <= 1e-12 * std::max(1.0, std::abs(d_ref)));

      auto y_ref = randoms(n, gen);
      auto y_vec = y_ref;
      ref.axpy(0.37, a.data(), y_ref.data(), n);
      t->axpy(0.37, a.data(), y_vec.data(), n);
      check_close(y_ref, y_vec, 1e-14);

      for (std::size_t rows : {1u, 2u, 5u, 9u}) {
        const auto m = randoms(rows * n, gen);
        const auto xr = randoms(rows, gen, 0.3);
        std::vector<double> g_ref(rows), g_vec(rows);
        ref.gemv(m.data(), rows, n, a.data(), g_ref.data());
        t->gemv(m.data(), rows, n, a.data(), g_vec.data());
        check_close(g_ref, g_vec, 1e-12);

        auto acc_ref = randoms(n, gen);
        auto acc_vec = acc_ref;
        ref.gemv_t_acc(m.data(), rows, n, xr.data(), acc_ref.data());
        t->gemv_t_acc(m.data(), rows, n, xr.data(), acc_vec.data());
        check_close(acc_ref, acc_vec, 1e-12);

        auto o_ref = m;
        auto o_vec = m;
        ref.ger_acc(-0.8, xr.data(), rows, b.data(), n, o_ref.data());
        t->ger_acc(-0.8, xr.data(), rows, b.data(), n, o_vec.data());
        check_close(o_ref, o_vec, 1e-13);
      }
    }
  }
}

TEST_CASE("vector Adam update is bitwise identical to the scalar one") {
  std::mt19937_64 gen(5);
  const AdamCoefficients c{0.001, 0.9, 0.999, 1e-8, 1.0 - std::pow(0.9, 3),
                           1.0 - std::pow(0.999, 3)};
  for (const KernelTable* t : vector_tables()) {
    for (std::size_t n : {1u, 4u, 13u, 100u}) {
      auto p_ref = randoms(n, gen);
      const auto g = randoms(n, gen);
      auto m_ref = randoms(n, gen);
      auto v_ref = randoms(n, gen);
      for (double& x : v_ref) x = std::abs(x);
      auto p_vec = p_ref, m_vec = m_ref, v_vec = v_ref;
      scalar_kernels().adam_update(c, p_ref.data(), g.data(), m_ref.data(), v_ref.data(), n);
      t->adam_update(c, p_vec.data(), g.data(), m_vec.data(), v_vec.data(), n);
      CHECK(p_ref == p_vec);
      CHECK(m_ref == m_vec);
      CHECK(v_ref == v_vec);
    }
  }
}

TEST_CASE("span wrappers reject mismatched lengths") {
  std::vector<double> a(3), b(4), y(2);
  CHECK_THROWS_AS(dot(a, b), Error);
  CHECK_THROWS_AS(axpy(1.0, a, b), Error);
  CHECK_THROWS_AS(gemv(a, 2, 2, b, y), Error);
  CHECK_THROWS_AS(ger_acc(1.0, a, y, b), Error);
}

TEST_CASE("switching the active table") {
  const Isa before = active_kernels().isa;
  REQUIRE(set_active_isa(Isa::kScalar));
  CHECK(active_kernels().isa == Isa::kScalar);
  std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, 5.0, 6.0};
  CHECK(dot(a, b) == 32.0);
  CHECK(set_active_isa(before));
}

}  // TEST_SUITE
