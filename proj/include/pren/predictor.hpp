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

// Zero-shot inference and evaluation.
//
// Classifier k only votes among its own subset Z_k. The ensemble score of an
// unseen class is its normalized vote
//
//   phi(x, c) = #{k : k voted c} / #{k : c in Z_k},
//
// and in the generalized setting a seen class scores the mean over heads of
// its raw inner product. Every argmax breaks ties toward the smallest class
// id.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pren/ensemble_model.hpp"
#include "pren/label_embedding.hpp"
#include "pren/matrix.hpp"

namespace pren {

// Argmax over `candidates` of a score vector indexed by class id - 1.
// Throws kArgument if candidates is empty.
ClassId restricted_argmax(std::span<const double> scores_by_class,
                          std::span<const ClassId> candidates);

// argmax over c in Z_k of <v, P M_c>.
ClassId classifier_predict(std::span<const double> embedding, const Matrix& projection,
                           const AttributeMatrix& attributes, std::span<const ClassId> subset);

struct VoteTable {
  std::vector<ClassId> classes;               // the unseen classes, column order
  std::vector<std::vector<ClassId>> raw;      // N x K per-classifier predictions
  Matrix phi;                                 // N x |classes|
  // Mean inner-product score among the classifiers that voted for the class
  // (0 where no classifier did). Used as the secondary ranking key.
  Matrix support;                             // N x |classes|
  std::vector<ClassId> predicted;             // argmax_c phi, ties to smallest id

  std::size_t num_instances() const noexcept { return raw.size(); }
};

// Builds phi and the argmax from raw predictions. Throws kConfiguration if an
// unseen class is in no subset, kArgument if a vote falls outside its
// classifier's subset.
VoteTable ensemble_vote(const std::vector<std::vector<ClassId>>& raw_predictions,
                        const std::vector<std::vector<ClassId>>& subsets,
                        std::span<const ClassId> unseen);

// Runs every classifier over every row of `instances` and votes.
VoteTable predict_votes(const EnsembleModel& model, const Matrix& instances,
                        std::span<const ClassId> unseen);

struct GzslOptions {
  // Subtracted from every seen-class score; 0 reproduces the plain rule.
  double seen_calibration = 0.0;
};

// Length-L vector: normalized votes for unseen classes, mean raw score for
// seen classes.
std::vector<double> gzsl_scores(const EnsembleModel& model, const ClassSplit& split,
                                std::span<const double> x, const GzslOptions& options = {});

ClassId gzsl_predict(std::span<const double> scores);

enum class EvalMode { kZsl, kGzsl };

struct EvalReport {
  EvalMode mode = EvalMode::kZsl;
  double per_class_top1 = 0.0;
  double macc = 0.0;
  // Generalized setting only.
  double unseen_top1 = 0.0;
  double seen_top1 = 0.0;
  double harmonic = 0.0;
  std::size_t instances = 0;
  std::vector<std::string> warnings;
};

double harmonic_mean(double u, double s);

// In zsl mode every truth label must be unseen (kArgument otherwise). Classes
// of the evaluated group with no test instance are left out of the
// per-class mean and reported in `warnings`.
EvalReport evaluate(std::span<const ClassId> predictions, std::span<const ClassId> truth,
                    const ClassSplit& split, EvalMode mode);

// Human-readable multi-line report.
std::string format_report(const EvalReport& report);
// One metric=value line per metric, six decimals.
std::string format_metrics(const EvalReport& report);

}  // namespace pren
