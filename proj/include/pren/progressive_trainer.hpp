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

// Progressive training with dynamically reselected pseudo-labels.
//
//   build the K projections; train the ensemble on the labeled seen data
//   repeat max_iter times:
//     vote on every unlabeled instance
//     per class keep the top N_pseudo instances by vote score
//     train on labeled data + this iteration's pseudo-labeled set
//
// The pseudo-set is rebuilt from scratch every iteration, so instances can
// enter and leave it. Refinement continues from the current parameters.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pren/dataset.hpp"
#include "pren/ensemble_model.hpp"
#include "pren/label_embedding.hpp"
#include "pren/predictor.hpp"

namespace pren {

struct TrainConfig {
  std::size_t K = 50;
  std::size_t h = 0;  // 0 selects default_projection_dim(m)
  std::size_t max_iter = 20;
  std::size_t batches_per_iter = 100;
  std::size_t batch_size = 64;
  double rho = 0.25;
  std::size_t n_max = 20;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool gzsl_mode = false;
  // Last iteration that selects unseen-class pseudo-labels only (generalized
  // setting). Unset means max_iter / 2.
  std::optional<std::size_t> t_unseen_only;
  // Ablations: one classifier on the original attributes over all unseen
  // classes; or K classifiers that all use the original attributes.
  bool single_classifier = false;
  bool no_projection = false;
  // Rounds of batches_per_iter batches before the first selection.
  std::size_t init_epochs = 1;
  // Unset: one layer of width d_in when d_in < 512, identity otherwise.
  std::optional<std::vector<std::size_t>> extractor_widths;
  std::vector<std::size_t> head_hidden = {512, 512};
  bool head_output_relu = false;
  double seen_calibration = 0.0;

  // Throws kConfiguration on out-of-range values.
  void validate() const;
  std::size_t unseen_only_iterations() const {
    return t_unseen_only.value_or(max_iter / 2);
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// min(floor(rho * n_avg), n_max), at least 1.
std::size_t compute_n_pseudo(double n_avg, double rho, std::size_t n_max);

struct PseudoEntry {
  std::size_t index;  // row in the unlabeled dataset
  InstanceId id;
  ClassId label;
  double score;

  friend bool operator==(const PseudoEntry&, const PseudoEntry&) = default;
};

struct PseudoSet {
  std::size_t iteration = 0;
  std::vector<PseudoEntry> entries;  // grouped by class, best first

  std::size_t size() const noexcept { return entries.size(); }
  std::size_t count(ClassId c) const;
};

// Candidate scores for selection: rows are unlabeled instances, columns are
// the classes pseudo-labels may take.
struct SelectionTable {
  std::vector<InstanceId> ids;
  std::vector<ClassId> classes;
  Matrix primary;                // ranking score, larger is better
  Matrix secondary;              // tie-break, larger is better
  std::vector<ClassId> assigned; // each instance's single predicted class
};

SelectionTable selection_from_votes(const VoteTable& votes, std::span<const InstanceId> ids);

// Per class, ranks instances by (primary desc, secondary desc, id asc) and
// takes the first n_pseudo; a pick survives only if the class is the
// instance's assigned class. Dropped picks are not backfilled.
PseudoSet select_pseudo(const SelectionTable& table, std::size_t n_pseudo);
PseudoSet select_pseudo(const VoteTable& votes, std::span<const InstanceId> ids,
                        std::size_t n_pseudo);

struct IterationRecord {
  std::size_t iteration = 0;
  double mean_loss = 0.0;
  std::size_t pseudo_count = 0;
  std::vector<std::pair<ClassId, std::size_t>> composition;  // classes with picks
  std::size_t churn = 0;  // instances selected last iteration but not this one
  std::optional<double> oracle_accuracy;
};

struct RunHistory {
  double initial_loss = 0.0;
  std::optional<double> initial_oracle_accuracy;
  std::vector<IterationRecord> records;

  // One line per iteration, tab-separated, preceded by a '#' header line.
  std::string to_text() const;
};

// What an observer sees after the initial training (iteration 0, empty
// pseudo-set) and after every refinement round.
struct IterationView {
  std::size_t iteration;
  const EnsembleModel& model;
  const PseudoSet& pseudo;
  std::span<const Example> train_set;
};

// Returns an accuracy to record in the history, or nothing. Evaluation code
// supplies this; the trainer itself never sees hidden labels.
using IterationObserver = std::function<std::optional<double>(const IterationView&)>;

struct TrainResult {
  EnsembleModel model;
  AdamState optimizer;
  RunHistory history;
};

// Resolved architecture and projection options for a config and data shape.
ModelArchitecture resolve_architecture(const TrainConfig& config, std::size_t input_dim);
ProjectionOptions resolve_projection(const TrainConfig& config, std::size_t attribute_dim);

// The zero-shot setting. `labeled` must carry seen-class labels only and
// `unlabeled` no labels at all.
TrainResult run(const TrainConfig& config, const FeatureDataset& labeled,
                const FeatureDataset& unlabeled, const AttributeMatrix& attributes,
                const ClassSplit& split, const IterationObserver& observer = {});

// The generalized setting: `unlabeled` may hold seen- and unseen-class
// instances. Iterations 1..t_unseen_only select unseen-class pseudo-labels by
// normalized vote; later iterations select over all classes by the
// generalized score.
TrainResult run_gzsl(const TrainConfig& config, const FeatureDataset& labeled,
                     const FeatureDataset& unlabeled, const AttributeMatrix& attributes,
                     const ClassSplit& split, const IterationObserver& observer = {});

// Predictions for every row of `instances`: zsl mode votes among unseen
// classes, gzsl mode takes the argmax of the generalized score.
std::vector<ClassId> predict(const EnsembleModel& model, const ClassSplit& split,
                             const Matrix& instances, EvalMode mode,
                             const GzslOptions& options = {});

}  // namespace pren
