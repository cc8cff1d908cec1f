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

// Desk-scale zero-shot tasks with a linear attribute-to-feature structure:
// each class gets a distinct binary attribute vector a_c, a fixed random map
// G (d x m) places its prototype at G a_c, and instances are the prototype
// plus isotropic Gaussian noise.

#pragma once

#include <cstdint>
#include <utility>

#include "pren/dataset.hpp"
#include "pren/label_embedding.hpp"
#include "pren/matrix.hpp"

namespace pren {

struct SyntheticSpec {
  std::size_t num_classes = 15;
  std::size_t num_seen = 10;
  std::size_t attribute_dim = 20;
  std::size_t feature_dim = 30;
  std::size_t instances_per_class = 40;
  double noise_sigma = 0.1;
  double attribute_density = 0.5;
  std::uint64_t seed = 0;
};

struct SyntheticTask {
  FeatureDataset data;  // every instance labeled
  AttributeMatrix attributes;
  ClassSplit split;     // the last L - L_s classes are unseen
  Matrix mixing;        // G, d x m
};

// Throws kArgument for an invalid spec, or when 1000 draws cannot produce a
// new distinct nonzero attribute vector.
SyntheticTask generate_synthetic(const SyntheticSpec& spec);

// Hides the labels of every unseen-class instance, plus a random
// `seen_holdout` fraction of each seen class (the generalized setting), and
// returns the hidden labels separately.
std::pair<TransductiveTask, LabelOracle> make_transductive(const SyntheticTask& task,
                                                           double seen_holdout,
                                                           std::uint64_t seed);

}  // namespace pren
