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

// Double-precision inner loops used by the MLP, the score readout and Adam.
//
// Every kernel has a portable scalar reference implementation. Vector
// variants (AVX2+FMA on x86-64, NEON on AArch64) are compiled in separate
// translation units and selected once at startup from the CPU feature bits.
// The environment variable PREN_SIMD=scalar|avx2|neon overrides the choice.
//
// Vector variants reassociate sums, so results agree with the scalar path to
// rounding, not bitwise. Within one process the selection never changes, so
// seeded runs stay reproducible on a given machine.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace pren::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct AdamCoefficients {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

// Raw-pointer kernel table. Matrices are dense row-major.
struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A is rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // y += A^T x, A is rows x cols, x has rows entries, y has cols entries
  void (*gemv_t_acc)(const double* a, std::size_t rows, std::size_t cols,
                     const double* x, double* y);
  // A += alpha * x y^T, x has rows entries, y has cols entries
  void (*ger_acc)(double alpha, const double* x, std::size_t rows,
                  const double* y, std::size_t cols, double* a);
  // Bias-corrected Adam update over n parameters.
  void (*adam_update)(const AdamCoefficients& c, double* params,
                      const double* grads, double* m, double* v,
                      std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* kernels_for(Isa isa);

// The table chosen at startup.
const KernelTable& active_kernels();

// Replaces the active table; returns false if the ISA is unavailable. Meant
// for tests and benchmarks, not for use while other threads run kernels.
bool set_active_isa(Isa isa);

// Span front-ends over the active table.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> x, std::span<double> y);
void ger_acc(double alpha, std::span<const double> x, std::span<const double> y,
             std::span<double> a);
void adam_update(const AdamCoefficients& c, std::span<double> params,
                 std::span<const double> grads, std::span<double> m,
                 std::span<double> v);

}  // namespace pren::simd
