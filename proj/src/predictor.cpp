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

#include "pren/predictor.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "pren/error.hpp"

namespace pren {
namespace {

bool in_sorted(std::span<const ClassId> ids, ClassId c) {
  return std::binary_search(ids.begin(), ids.end(), c);
}

// Per-class accuracy averaged over the classes in `group` that have at least
// one test instance. Absent classes produce a warning.
double per_class_accuracy(std::span<const ClassId> predictions, std::span<const ClassId> truth,
                          std::span<const ClassId> group, const char* group_name,
                          std::vector<std::string>& warnings) {
  std::map<ClassId, std::pair<std::size_t, std::size_t>> tally;  // correct, total
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!in_sorted(group, truth[i])) continue;
    auto& [correct, total] = tally[truth[i]];
    ++total;
    if (predictions[i] == truth[i]) ++correct;
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (ClassId c : group) {
    auto it = tally.find(c);
    if (it == tally.end()) {
      warnings.push_back(std::string(group_name) + " class " + std::to_string(c) +
                         " has no test instances; excluded from the per-class mean");
      continue;
    }
    sum += static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

}  // namespace

ClassId restricted_argmax(std::span<const double> scores_by_class,
                          std::span<const ClassId> candidates) {
  require(!candidates.empty(), ErrorKind::kArgument, "argmax over an empty class subset");
  ClassId best = 0;
  double best_score = 0.0;
  for (ClassId c : candidates) {
    require(c >= 1 && static_cast<std::size_t>(c) <= scores_by_class.size(),
            ErrorKind::kLabel, "candidate class " + std::to_string(c) + " out of range");
    const double s = scores_by_class[static_cast<std::size_t>(c - 1)];
    if (best == 0 || s > best_score || (s == best_score && c < best)) {
      best = c;
      best_score = s;
    }
  }
  return best;
}

ClassId classifier_predict(std::span<const double> embedding, const Matrix& projection,
                           const AttributeMatrix& attributes, std::span<const ClassId> subset) {
  require(!subset.empty(), ErrorKind::kArgument, "classifier subset is empty");
  return restricted_argmax(class_scores(embedding, projection, attributes), subset);
}

VoteTable ensemble_vote(const std::vector<std::vector<ClassId>>& raw_predictions,
                        const std::vector<std::vector<ClassId>>& subsets,
                        std::span<const ClassId> unseen) {
  VoteTable table;
  table.classes.assign(unseen.begin(), unseen.end());
  std::sort(table.classes.begin(), table.classes.end());
  const std::size_t nu = table.classes.size();
  require(nu >= 1, ErrorKind::kArgument, "no unseen classes to vote over");

  std::vector<double> coverage(nu, 0.0);
  for (const auto& z : subsets) {
    for (std::size_t j = 0; j < nu; ++j) {
      if (std::find(z.begin(), z.end(), table.classes[j]) != z.end()) coverage[j] += 1.0;
    }
  }
  for (std::size_t j = 0; j < nu; ++j) {
    require(coverage[j] > 0.0, ErrorKind::kConfiguration,
            "unseen class " + std::to_string(table.classes[j]) + " is in no classifier subset");
  }

  const std::size_t n = raw_predictions.size();
  table.raw = raw_predictions;
  table.phi = Matrix(n, nu);
  table.support = Matrix(n, nu);
  table.predicted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& votes = raw_predictions[i];
    require(votes.size() == subsets.size(), ErrorKind::kDimension,
            "instance " + std::to_string(i) + " has " + std::to_string(votes.size()) +
                " votes for " + std::to_string(subsets.size()) + " classifiers");
    for (std::size_t k = 0; k < votes.size(); ++k) {
      const auto& z = subsets[k];
      require(std::find(z.begin(), z.end(), votes[k]) != z.end(), ErrorKind::kArgument,
              "classifier " + std::to_string(k) + " voted class " + std::to_string(votes[k]) +
                  " outside its subset");
      const auto pos = std::lower_bound(table.classes.begin(), table.classes.end(), votes[k]);
      table.phi(i, static_cast<std::size_t>(pos - table.classes.begin())) += 1.0;
    }
    std::size_t best = 0;
    for (std::size_t j = 0; j < nu; ++j) {
      table.phi(i, j) /= coverage[j];
      // Columns are in ascending id order, so strict > keeps the smallest id.
      if (table.phi(i, j) > table.phi(i, best)) best = j;
    }
    table.predicted[i] = table.classes[best];
  }
  return table;
}

VoteTable predict_votes(const EnsembleModel& model, const Matrix& instances,
                        std::span<const ClassId> unseen) {
  const auto& subsets = model.projections().subsets;
  const std::size_t n = instances.rows();
  std::vector<std::vector<ClassId>> raw(n, std::vector<ClassId>(model.num_heads()));
  std::vector<std::vector<double>> voted_score(n, std::vector<double>(model.num_heads()));
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> feats = model.features(instances.row(i));
    for (std::size_t k = 0; k < model.num_heads(); ++k) {
      const std::vector<double> scores = model.head_scores(k, model.head_embedding(k, feats));
      raw[i][k] = restricted_argmax(scores, subsets[k]);
      voted_score[i][k] = scores[static_cast<std::size_t>(raw[i][k] - 1)];
    }
  }
  VoteTable table = ensemble_vote(raw, subsets, unseen);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < table.classes.size(); ++j) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t k = 0; k < model.num_heads(); ++k) {
        if (raw[i][k] == table.classes[j]) {
          sum += voted_score[i][k];
          ++count;
        }
      }
      table.support(i, j) = count == 0 ? 0.0 : sum / static_cast<double>(count);
    }
  }
  return table;
}

std::vector<double> gzsl_scores(const EnsembleModel& model, const ClassSplit& split,
                                std::span<const double> x, const GzslOptions& options) {
  const std::size_t classes = model.num_classes();
  require(split.num_classes() == classes, ErrorKind::kDimension,
          "split and model disagree on the class count");
  const auto& subsets = model.projections().subsets;
  std::vector<double> seen_sum(classes, 0.0);
  std::vector<double> votes(classes, 0.0);
  std::vector<double> coverage(classes, 0.0);
  const std::vector<double> feats = model.features(x);
  for (std::size_t k = 0; k < model.num_heads(); ++k) {
    const std::vector<double> scores = model.head_scores(k, model.head_embedding(k, feats));
    for (std::size_t c = 0; c < classes; ++c) seen_sum[c] += scores[c];
    votes[static_cast<std::size_t>(restricted_argmax(scores, subsets[k]) - 1)] += 1.0;
    for (ClassId c : subsets[k]) coverage[static_cast<std::size_t>(c - 1)] += 1.0;
  }
  std::vector<double> out(classes, 0.0);
  const double inv_k = 1.0 / static_cast<double>(model.num_heads());
  for (ClassId c = 1; c <= static_cast<ClassId>(classes); ++c) {
    const std::size_t i = static_cast<std::size_t>(c - 1);
    if (split.is_seen(c)) {
      out[i] = seen_sum[i] * inv_k - options.seen_calibration;
    } else {
      require(coverage[i] > 0.0, ErrorKind::kConfiguration,
              "unseen class " + std::to_string(c) + " is in no classifier subset");
      out[i] = votes[i] / coverage[i];
    }
  }
  return out;
}

ClassId gzsl_predict(std::span<const double> scores) {
  require(!scores.empty(), ErrorKind::kArgument, "empty score vector");
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<ClassId>(best + 1);
}

double harmonic_mean(double u, double s) {
  return u + s > 0.0 ? 2.0 * u * s / (u + s) : 0.0;
}

EvalReport evaluate(std::span<const ClassId> predictions, std::span<const ClassId> truth,
                    const ClassSplit& split, EvalMode mode) {
  require(predictions.size() == truth.size(), ErrorKind::kDimension,
          "predictions and truth differ in length");
  require(!truth.empty(), ErrorKind::kData, "nothing to evaluate");
  EvalReport report;
  report.mode = mode;
  report.instances = truth.size();

  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 1 && static_cast<std::size_t>(truth[i]) <= split.num_classes(),
            ErrorKind::kLabel, "true label " + std::to_string(truth[i]) + " out of range");
    if (mode == EvalMode::kZsl) {
      require(split.is_unseen(truth[i]), ErrorKind::kArgument,
              "zsl evaluation got a seen-class instance (label " + std::to_string(truth[i]) +
                  ")");
    }
    if (predictions[i] == truth[i]) ++correct;
  }
  report.macc = static_cast<double>(correct) / static_cast<double>(truth.size());

  if (mode == EvalMode::kZsl) {
    report.per_class_top1 =
        per_class_accuracy(predictions, truth, split.unseen(), "unseen", report.warnings);
    return report;
  }
  std::vector<ClassId> all = split.seen();
  all.insert(all.end(), split.unseen().begin(), split.unseen().end());
  std::sort(all.begin(), all.end());
  std::vector<std::string> ignored;
  report.per_class_top1 = per_class_accuracy(predictions, truth, all, "", ignored);
  report.unseen_top1 =
      per_class_accuracy(predictions, truth, split.unseen(), "unseen", report.warnings);
  report.seen_top1 = per_class_accuracy(predictions, truth, split.seen(), "seen", report.warnings);
  report.harmonic = harmonic_mean(report.unseen_top1, report.seen_top1);
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  char line[128];
  out << "mode: " << (report.mode == EvalMode::kZsl ? "zsl" : "gzsl") << "\n";
  out << "instances: " << report.instances << "\n";
  std::snprintf(line, sizeof line, "per-class top-1: %.4f\n", report.per_class_top1);
  out << line;
  std::snprintf(line, sizeof line, "multi-class acc: %.4f\n", report.macc);
  out << line;
  if (report.mode == EvalMode::kGzsl) {
    std::snprintf(line, sizeof line, "unseen (u): %.4f\nseen (s): %.4f\nharmonic (H): %.4f\n",
                  report.unseen_top1, report.seen_top1, report.harmonic);
    out << line;
  }
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string format_metrics(const EvalReport& report) {
  std::string out;
  char line[64];
  auto emit = [&](const char* key, double value) {
    std::snprintf(line, sizeof line, "%s=%.6f\n", key, value);
    out += line;
  };
  emit("per_class_top1", report.per_class_top1);
  emit("macc", report.macc);
  if (report.mode == EvalMode::kGzsl) {
    emit("u", report.unseen_top1);
    emit("s", report.seen_top1);
    emit("h", report.harmonic);
  }
  return out;
}

}  // namespace pren
