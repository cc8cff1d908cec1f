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

// Feature datasets, the hidden-label oracle and their text formats.
//
// features:   "dim=<d> count=<n>" then "id<TAB>label-or-?<TAB>v1,v2,..."
// attributes: "dim=<m> count=<L>" then "classid<TAB>a1,a2,..."
// split:      "seen: 1,2,..." and "unseen: ..."
// labels:     "count=<n>" then "id<TAB>label" (hidden labels, evaluation only)

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pren/label_embedding.hpp"
#include "pren/matrix.hpp"

namespace pren {

using InstanceId = std::int64_t;

struct FeatureDataset {
  std::size_t dim = 0;
  std::vector<InstanceId> ids;
  Matrix features;  // size() x dim
  std::vector<std::optional<ClassId>> labels;
  std::string provenance;

  std::size_t size() const noexcept { return ids.size(); }
  // Appends one instance; throws kDimension on a width mismatch.
  void add(InstanceId id, std::span<const double> x, std::optional<ClassId> label);
  // Finite values, unique ids, labels within 1..num_classes.
  void validate(std::size_t num_classes) const;

  friend bool operator==(const FeatureDataset& a, const FeatureDataset& b) {
    return a.dim == b.dim && a.ids == b.ids && a.features == b.features &&
           a.labels == b.labels;
  }
};

// True labels of the unlabeled instances. Only evaluation code holds one;
// the training entry points never take it.
class LabelOracle {
 public:
  void set(InstanceId id, ClassId label) { labels_[id] = label; }
  std::optional<ClassId> find(InstanceId id) const;
  // Labels for every instance of `data`; throws kValidation on a missing id.
  std::vector<ClassId> labels_for(const FeatureDataset& data) const;
  std::size_t size() const noexcept { return labels_.size(); }
  const std::map<InstanceId, ClassId>& entries() const noexcept { return labels_; }

  friend bool operator==(const LabelOracle&, const LabelOracle&) = default;

 private:
  std::map<InstanceId, ClassId> labels_;
};

// What the trainer sees: labeled seen-class data and label-free instances.
struct TransductiveTask {
  FeatureDataset labeled;
  FeatureDataset unlabeled;
  AttributeMatrix attributes;
  ClassSplit split;
};

struct LoadedData {
  FeatureDataset dataset;
  AttributeMatrix attributes;
  ClassSplit split;
  LabelOracle oracle;
};

void save_features(const std::filesystem::path& path, const FeatureDataset& data);
FeatureDataset load_features(const std::filesystem::path& path);
void save_attributes(const std::filesystem::path& path, const AttributeMatrix& attributes);
AttributeMatrix load_attributes(const std::filesystem::path& path);
void save_split(const std::filesystem::path& path, const ClassSplit& split);
ClassSplit load_split(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelOracle& oracle);
LabelOracle load_labels(const std::filesystem::path& path);

// Loads and cross-validates the four files. labels_path may be empty when no
// oracle is available. Labeled instances must carry seen labels; oracle ids
// must refer to unlabeled instances.
LoadedData load_dataset(const std::filesystem::path& features_path,
                        const std::filesystem::path& labels_path,
                        const std::filesystem::path& attributes_path,
                        const std::filesystem::path& split_path);

// Partitions into labeled / unlabeled instances.
TransductiveTask to_task(const LoadedData& data);

// Directory layout used by the CLI: features.txt, labels.txt,
// attributes.txt, split.txt.
struct TaskFiles {
  std::filesystem::path features, labels, attributes, split;
  explicit TaskFiles(const std::filesystem::path& dir);
};

void save_task(const std::filesystem::path& dir, const TransductiveTask& task,
               const LabelOracle& oracle);
LoadedData load_task(const std::filesystem::path& dir);

}  // namespace pren
