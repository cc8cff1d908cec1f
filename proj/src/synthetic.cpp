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

#include "pren/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pren/error.hpp"
#include "pren/rng.hpp"

namespace pren {
namespace {

constexpr int kMaxAttributeDraws = 1000;

void check_spec(const SyntheticSpec& s) {
  require(s.num_seen >= 1 && s.num_seen < s.num_classes, ErrorKind::kArgument,
          "synthetic spec needs 1 <= L_s < L");
  require(s.attribute_dim >= 2, ErrorKind::kArgument, "synthetic spec needs m >= 2");
  require(s.feature_dim >= 1, ErrorKind::kArgument, "synthetic spec needs d >= 1");
  require(s.instances_per_class >= 1, ErrorKind::kArgument,
          "synthetic spec needs at least one instance per class");
  require(s.noise_sigma >= 0.0 && std::isfinite(s.noise_sigma), ErrorKind::kArgument,
          "synthetic spec needs noise_sigma >= 0");
  require(s.attribute_density > 0.0 && s.attribute_density < 1.0, ErrorKind::kArgument,
          "synthetic spec needs attribute density in (0, 1)");
}

}  // namespace

SyntheticTask generate_synthetic(const SyntheticSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  const std::size_t m = spec.attribute_dim;
  const std::size_t d = spec.feature_dim;

  Matrix attributes(m, spec.num_classes);
  std::set<std::vector<double>> used;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    std::vector<double> a(m);
    bool accepted = false;
    for (int draw = 0; draw < kMaxAttributeDraws && !accepted; ++draw) {
      for (double& x : a) x = rng.uniform01() < spec.attribute_density ? 1.0 : 0.0;
      const bool zero = std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; });
      accepted = !zero && used.insert(a).second;
    }
    require(accepted, ErrorKind::kArgument,
            "could not draw a distinct attribute vector for class " + std::to_string(c + 1) +
                " in " + std::to_string(kMaxAttributeDraws) + " tries; m=" +
                std::to_string(m) + " is too small for L=" + std::to_string(spec.num_classes));
    for (std::size_t i = 0; i < m; ++i) attributes(i, c) = a[i];
  }

  Matrix mixing(d, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& g : mixing.data()) g = scale * rng.normal();

  SyntheticTask task{{}, AttributeMatrix(attributes), {}, mixing};
  task.data.dim = d;
  task.data.features = Matrix(0, d);
  task.data.provenance = "synthetic seed=" + std::to_string(spec.seed);
  std::vector<double> prototype(d);
  std::vector<double> x(d);
  InstanceId next_id = 0;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += mixing(r, i) * attributes(i, c);
      prototype[r] = sum;
    }
    for (std::size_t n = 0; n < spec.instances_per_class; ++n) {
      for (std::size_t r = 0; r < d; ++r) x[r] = prototype[r] + spec.noise_sigma * rng.normal();
      task.data.add(next_id++, x, static_cast<ClassId>(c + 1));
    }
  }

  std::vector<ClassId> seen;
  std::vector<ClassId> unseen;
  for (std::size_t c = 1; c <= spec.num_classes; ++c) {
    (c <= spec.num_seen ? seen : unseen).push_back(static_cast<ClassId>(c));
  }
  task.split = ClassSplit(std::move(seen), std::move(unseen));
  return task;
}

std::pair<TransductiveTask, LabelOracle> make_transductive(const SyntheticTask& task,
                                                           double seen_holdout,
                                                           std::uint64_t seed) {
  require(seen_holdout >= 0.0 && seen_holdout < 1.0, ErrorKind::kArgument,
          "seen holdout fraction must be in [0, 1)");
  const FeatureDataset& all = task.data;
  Rng rng(seed);

  // Per seen class, pick round(fraction * count) instances to hide.
  std::set<InstanceId> held_out;
  for (ClassId c : task.split.seen()) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all.labels[i] == c) members.push_back(i);
    }
    const auto count = static_cast<std::size_t>(
        std::lround(seen_holdout * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.uniform_index(members.size() - i);
      std::swap(members[i], members[j]);
      held_out.insert(all.ids[members[i]]);
    }
  }

  TransductiveTask out{{}, {}, task.attributes, task.split};
  out.labeled.dim = out.unlabeled.dim = all.dim;
  out.labeled.features = Matrix(0, all.dim);
  out.unlabeled.features = Matrix(0, all.dim);
  out.labeled.provenance = all.provenance + " (labeled)";
  out.unlabeled.provenance = all.provenance + " (unlabeled)";
  LabelOracle oracle;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const ClassId label = all.labels[i].value();
    if (task.split.is_seen(label) && held_out.count(all.ids[i]) == 0) {
      out.labeled.add(all.ids[i], all.features.row(i), label);
    } else {
      out.unlabeled.add(all.ids[i], all.features.row(i), std::nullopt);
      oracle.set(all.ids[i], label);
    }
  }
  return {std::move(out), std::move(oracle)};
}

}  // namespace pren
