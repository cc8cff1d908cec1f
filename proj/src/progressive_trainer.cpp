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

#include "pren/progressive_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pren/error.hpp"
#include "pren/fileio.hpp"
#include "pren/rng.hpp"

namespace pren {
namespace {

constexpr std::size_t kPretrainedFeatureWidth = 512;

// Seed streams derived from config.seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kPretrainStream = 1000;
constexpr std::uint64_t kRefineStream = 2000;

void check_inputs(const FeatureDataset& labeled, const FeatureDataset& unlabeled,
                  const AttributeMatrix& attributes, const ClassSplit& split) {
  require(split.num_classes() == attributes.num_classes(), ErrorKind::kDimension,
          "split and attributes disagree on the class count");
  require(labeled.size() > 0, ErrorKind::kData, "no labeled training data");
  require(labeled.dim == unlabeled.dim || unlabeled.size() == 0, ErrorKind::kDimension,
          "labeled and unlabeled data differ in feature dimension");
  labeled.validate(split.num_classes());
  unlabeled.validate(split.num_classes());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    require(labeled.labels[i].has_value() && split.is_seen(*labeled.labels[i]), ErrorKind::kData,
            "labeled instance " + std::to_string(labeled.ids[i]) +
                " must carry a seen-class label");
  }
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    require(!unlabeled.labels[i].has_value(), ErrorKind::kData,
            "unlabeled instance " + std::to_string(unlabeled.ids[i]) + " carries a label");
  }
}

SelectionTable selection_from_gzsl(const EnsembleModel& model, const ClassSplit& split,
                                   const FeatureDataset& unlabeled,
                                   const GzslOptions& options) {
  SelectionTable table;
  table.ids = unlabeled.ids;
  table.classes.resize(split.num_classes());
  std::iota(table.classes.begin(), table.classes.end(), ClassId{1});
  table.primary = Matrix(unlabeled.size(), split.num_classes());
  table.secondary = Matrix(unlabeled.size(), split.num_classes());
  table.assigned.resize(unlabeled.size());
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const std::vector<double> scores =
        gzsl_scores(model, split, unlabeled.features.row(i), options);
    std::copy(scores.begin(), scores.end(), table.primary.row(i).begin());
    table.assigned[i] = gzsl_predict(scores);
  }
  return table;
}

std::vector<Example> training_set(const FeatureDataset& labeled, const FeatureDataset& unlabeled,
                                  const PseudoSet& pseudo) {
  std::vector<Example> out;
  out.reserve(labeled.size() + pseudo.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    out.push_back({labeled.features.row(i), *labeled.labels[i]});
  }
  for (const PseudoEntry& e : pseudo.entries) {
    out.push_back({unlabeled.features.row(e.index), e.label});
  }
  return out;
}

std::size_t churn_between(const PseudoSet& previous, const PseudoSet& current) {
  std::set<InstanceId> now;
  for (const PseudoEntry& e : current.entries) now.insert(e.id);
  return static_cast<std::size_t>(
      std::count_if(previous.entries.begin(), previous.entries.end(),
                    [&](const PseudoEntry& e) { return now.count(e.id) == 0; }));
}

TrainResult run_impl(const TrainConfig& config, const FeatureDataset& labeled,
                     const FeatureDataset& unlabeled, const AttributeMatrix& attributes,
                     const ClassSplit& split, bool generalized,
                     const IterationObserver& observer) {
  config.validate();
  check_inputs(labeled, unlabeled, attributes, split);

  ProjectionSet projections =
      build_projection_set(attributes, split, resolve_projection(config, attributes.dim()));
  EnsembleModel model(resolve_architecture(config, labeled.dim), std::move(projections),
                      attributes);
  model.initialize(derive_seed(config.seed, kInitStream));
  AdamState optimizer(model.parameter_count());
  optimizer.learning_rate = config.learning_rate;
  optimizer.beta1 = config.beta1;
  optimizer.beta2 = config.beta2;
  optimizer.epsilon = config.epsilon;

  RunHistory history;
  PseudoSet pseudo;
  std::vector<Example> train = training_set(labeled, unlabeled, pseudo);
  double init_loss = 0.0;
  for (std::size_t e = 0; e < config.init_epochs; ++e) {
    init_loss = train_epoch(model, optimizer, train, config.batches_per_iter, config.batch_size,
                            derive_seed(config.seed, kPretrainStream + e));
  }
  history.initial_loss = init_loss;
  if (observer) history.initial_oracle_accuracy = observer({0, model, pseudo, train});

  const double n_avg =
      static_cast<double>(labeled.size()) / static_cast<double>(split.seen().size());
  const std::size_t n_pseudo = compute_n_pseudo(n_avg, config.rho, config.n_max);
  const GzslOptions gzsl_options{config.seen_calibration};

  for (std::size_t t = 1; t <= config.max_iter; ++t) {
    PseudoSet next;
    if (unlabeled.size() > 0) {
      const bool unseen_only = !generalized || t <= config.unseen_only_iterations();
      if (unseen_only) {
        const VoteTable votes = predict_votes(model, unlabeled.features, split.unseen());
        next = select_pseudo(votes, unlabeled.ids, n_pseudo);
      } else {
        next = select_pseudo(selection_from_gzsl(model, split, unlabeled, gzsl_options),
                             n_pseudo);
      }
    }
    next.iteration = t;

    IterationRecord record;
    record.iteration = t;
    record.churn = churn_between(pseudo, next);
    record.pseudo_count = next.size();
    for (ClassId c = 1; c <= static_cast<ClassId>(split.num_classes()); ++c) {
      if (const std::size_t n = next.count(c); n > 0) record.composition.emplace_back(c, n);
    }
    pseudo = std::move(next);

    train = training_set(labeled, unlabeled, pseudo);
    record.mean_loss = train_epoch(model, optimizer, train, config.batches_per_iter,
                                   config.batch_size, derive_seed(config.seed, kRefineStream + t));
    if (observer) record.oracle_accuracy = observer({t, model, pseudo, train});
    history.records.push_back(std::move(record));
  }
  return {std::move(model), std::move(optimizer), std::move(history)};
}

}  // namespace

void TrainConfig::validate() const {
  require(K >= 1, ErrorKind::kConfiguration, "K must be at least 1");
  require(batch_size >= 1, ErrorKind::kConfiguration, "batch_size must be at least 1");
  require(rho > 0.0 && rho <= 1.0, ErrorKind::kConfiguration, "rho must be in (0, 1]");
  require(n_max >= 1, ErrorKind::kConfiguration, "n_max must be at least 1");
  require(learning_rate > 0.0, ErrorKind::kConfiguration, "learning_rate must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          ErrorKind::kConfiguration, "Adam betas must be in [0, 1)");
  require(epsilon > 0.0, ErrorKind::kConfiguration, "epsilon must be positive");
  require(!t_unseen_only || *t_unseen_only <= max_iter, ErrorKind::kConfiguration,
          "t_unseen_only cannot exceed max_iter");
  for (std::size_t w : head_hidden) {
    require(w >= 1, ErrorKind::kConfiguration, "head_hidden widths must be positive");
  }
  if (extractor_widths) {
    for (std::size_t w : *extractor_widths) {
      require(w >= 1, ErrorKind::kConfiguration, "extractor widths must be positive");
    }
  }
}

std::size_t compute_n_pseudo(double n_avg, double rho, std::size_t n_max) {
  require(n_avg > 0.0, ErrorKind::kArgument, "average class size must be positive");
  const auto scaled = static_cast<std::size_t>(std::floor(rho * n_avg));
  return std::max<std::size_t>(1, std::min(scaled, n_max));
}

std::size_t PseudoSet::count(ClassId c) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [c](const PseudoEntry& e) { return e.label == c; }));
}

SelectionTable selection_from_votes(const VoteTable& votes, std::span<const InstanceId> ids) {
  require(ids.size() == votes.num_instances(), ErrorKind::kDimension,
          "vote table and id list differ in length");
  return {{ids.begin(), ids.end()}, votes.classes, votes.phi, votes.support, votes.predicted};
}

PseudoSet select_pseudo(const SelectionTable& table, std::size_t n_pseudo) {
  const std::size_t n = table.ids.size();
  require(table.primary.rows() == n && table.secondary.rows() == n &&
              table.assigned.size() == n && table.primary.cols() == table.classes.size() &&
              table.secondary.cols() == table.classes.size(),
          ErrorKind::kDimension, "selection table shapes disagree");
  PseudoSet out;
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < table.classes.size(); ++j) {
    const ClassId c = table.classes[j];
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(n_pseudo, n);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        if (table.primary(a, j) != table.primary(b, j)) {
                          return table.primary(a, j) > table.primary(b, j);
                        }
                        if (table.secondary(a, j) != table.secondary(b, j)) {
                          return table.secondary(a, j) > table.secondary(b, j);
                        }
                        return table.ids[a] < table.ids[b];
                      });
    for (std::size_t r = 0; r < take; ++r) {
      const std::size_t i = order[r];
      if (table.assigned[i] == c) out.entries.push_back({i, table.ids[i], c, table.primary(i, j)});
    }
  }
  return out;
}

PseudoSet select_pseudo(const VoteTable& votes, std::span<const InstanceId> ids,
                        std::size_t n_pseudo) {
  return select_pseudo(selection_from_votes(votes, ids), n_pseudo);
}

std::string RunHistory::to_text() const {
  std::string out = "# iteration\tloss\tpseudo\tchurn\toracle_top1\tcomposition\n";
  for (const IterationRecord& r : records) {
    out += std::to_string(r.iteration) + '\t' + format_double(r.mean_loss) + '\t' +
           std::to_string(r.pseudo_count) + '\t' + std::to_string(r.churn) + '\t' +
           (r.oracle_accuracy ? format_double(*r.oracle_accuracy) : std::string("-")) + '\t';
    for (std::size_t i = 0; i < r.composition.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(r.composition[i].first) + ':' + std::to_string(r.composition[i].second);
    }
    if (r.composition.empty()) out += '-';
    out += '\n';
  }
  return out;
}

ModelArchitecture resolve_architecture(const TrainConfig& config, std::size_t input_dim) {
  ModelArchitecture arch;
  arch.input_dim = input_dim;
  if (config.extractor_widths) {
    arch.extractor_widths = *config.extractor_widths;
  } else if (input_dim < kPretrainedFeatureWidth) {
    arch.extractor_widths = {input_dim};
  }
  arch.head_hidden = config.head_hidden;
  arch.head_output_relu = config.head_output_relu;
  return arch;
}

ProjectionOptions resolve_projection(const TrainConfig& config, std::size_t attribute_dim) {
  ProjectionOptions options;
  options.num_classifiers = config.single_classifier ? 1 : config.K;
  options.h = config.h == 0 ? default_projection_dim(attribute_dim) : config.h;
  options.seed = config.seed;
  const bool original = config.single_classifier || config.no_projection;
  options.mode = original ? ProjectionMode::kIdentity : ProjectionMode::kEigen;
  options.full_unseen_subsets = config.single_classifier;
  return options;
}

TrainResult run(const TrainConfig& config, const FeatureDataset& labeled,
                const FeatureDataset& unlabeled, const AttributeMatrix& attributes,
                const ClassSplit& split, const IterationObserver& observer) {
  return run_impl(config, labeled, unlabeled, attributes, split, false, observer);
}

TrainResult run_gzsl(const TrainConfig& config, const FeatureDataset& labeled,
                     const FeatureDataset& unlabeled, const AttributeMatrix& attributes,
                     const ClassSplit& split, const IterationObserver& observer) {
  return run_impl(config, labeled, unlabeled, attributes, split, true, observer);
}

std::vector<ClassId> predict(const EnsembleModel& model, const ClassSplit& split,
                             const Matrix& instances, EvalMode mode,
                             const GzslOptions& options) {
  if (mode == EvalMode::kZsl) return predict_votes(model, instances, split.unseen()).predicted;
  std::vector<ClassId> out;
  out.reserve(instances.rows());
  for (std::size_t i = 0; i < instances.rows(); ++i) {
    out.push_back(gzsl_predict(gzsl_scores(model, split, instances.row(i), options)));
  }
  return out;
}

}  // namespace pren
