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

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "pren/error.hpp"

namespace pren::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("PREN_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && kernels_for(Isa::kAvx2)) return kernels_for(Isa::kAvx2);
    if (want == "neon" && kernels_for(Isa::kNeon)) return kernels_for(Isa::kNeon);
  }
  if (const KernelTable* t = kernels_for(Isa::kAvx2)) return t;
  if (const KernelTable* t = kernels_for(Isa::kNeon)) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{pick_default()};
  return slot;
}

void check_same(std::size_t a, std::size_t b, const char* what) {
  require(a == b, ErrorKind::kDimension, what);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &scalar_kernels();
    case Isa::kAvx2: {
      static const bool ok = cpu_has_avx2_fma();
      return ok ? detail::avx2_table() : nullptr;
    }
    case Isa::kNeon:
      return detail::neon_table();
  }
  return nullptr;
}

const KernelTable& active_kernels() {
  return *active_slot().load(std::memory_order_relaxed);
}

bool set_active_isa(Isa isa) {
  const KernelTable* table = kernels_for(isa);
  if (table == nullptr) return false;
  active_slot().store(table, std::memory_order_relaxed);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size(), "dot: length mismatch");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size(), "axpy: length mismatch");
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  check_same(a.size(), rows * cols, "gemv: matrix size");
  check_same(x.size(), cols, "gemv: input length");
  check_same(y.size(), rows, "gemv: output length");
  active_kernels().gemv(a.data(), rows, cols, x.data(), y.data());
}

void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y) {
  check_same(a.size(), rows * cols, "gemv_t_acc: matrix size");
  check_same(x.size(), rows, "gemv_t_acc: input length");
  check_same(y.size(), cols, "gemv_t_acc: output length");
  active_kernels().gemv_t_acc(a.data(), rows, cols, x.data(), y.data());
}

void ger_acc(double alpha, std::span<const double> x, std::span<const double> y,
             std::span<double> a) {
  check_same(a.size(), x.size() * y.size(), "ger_acc: matrix size");
  active_kernels().ger_acc(alpha, x.data(), x.size(), y.data(), y.size(),
                           a.data());
}

void adam_update(const AdamCoefficients& c, std::span<double> params,
                 std::span<const double> grads, std::span<double> m,
                 std::span<double> v) {
  check_same(params.size(), grads.size(), "adam_update: gradient length");
  check_same(params.size(), m.size(), "adam_update: first moment length");
  check_same(params.size(), v.size(), "adam_update: second moment length");
  active_kernels().adam_update(c, params.data(), grads.data(), m.data(),
                               v.data(), params.size());
}

}  // namespace pren::simd
