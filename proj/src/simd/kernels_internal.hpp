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

#include "pren/simd/kernels.hpp"

namespace pren::simd::detail {

// Defined in the per-ISA translation units. Each returns nullptr when the
// variant is not built for the current target architecture.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace pren::simd::detail
