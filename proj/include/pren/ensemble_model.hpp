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

// The ensemble network: a shared MLP feature extractor feeding K MLP heads.
// Head k maps features to an h-dimensional embedding v_k and scores class c
// by <v_k, P_k M_c>. Training minimizes the per-batch mean over instances of
// the summed per-head softmax cross-entropy, softmax taken over all L
// classes.
//
// All parameters live in one flat vector in declaration order: extractor
// layers first, then head 0 .. head K-1; each layer stores its weight
// (out x in, row-major) followed by its bias.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pren/label_embedding.hpp"
#include "pren/matrix.hpp"

namespace pren {

struct ModelArchitecture {
  std::size_t input_dim = 0;
  // Output widths of the extractor layers; empty means identity features.
  std::vector<std::size_t> extractor_widths;
  // Hidden widths of each head; the head output width is h.
  std::vector<std::size_t> head_hidden;
  // Rectifier after the head output layer as well as the hidden layers.
  bool head_output_relu = false;

  std::size_t feature_dim() const {
    return extractor_widths.empty() ? input_dim : extractor_widths.back();
  }
  friend bool operator==(const ModelArchitecture&, const ModelArchitecture&) = default;
};

struct LayerShape {
  std::size_t weight_offset;
  std::size_t bias_offset;
  std::size_t in;
  std::size_t out;
  bool relu;
};

struct LayerView {
  std::span<double> weight;  // out x in, row-major
  std::span<double> bias;
  std::size_t in;
  std::size_t out;
};

struct ParamRange {
  std::size_t offset;
  std::size_t size;
};

struct Example {
  std::span<const double> features;
  ClassId label;
};

class EnsembleModel {
 public:
  EnsembleModel(ModelArchitecture arch, ProjectionSet projections,
                AttributeMatrix attributes);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  void initialize(std::uint64_t seed);

  const ModelArchitecture& architecture() const noexcept { return arch_; }
  const ProjectionSet& projections() const noexcept { return projections_; }
  const AttributeMatrix& attributes() const noexcept { return attributes_; }

  std::size_t num_heads() const noexcept { return projections_.size(); }
  std::size_t num_classes() const noexcept { return attributes_.num_classes(); }
  std::size_t input_dim() const noexcept { return arch_.input_dim; }
  std::size_t feature_dim() const noexcept { return arch_.feature_dim(); }
  std::size_t embedding_dim() const noexcept { return projections_.h; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  ParamRange extractor_range() const;
  ParamRange head_range(std::size_t k) const;
  const std::vector<LayerShape>& extractor_layers() const noexcept { return extractor_; }
  const std::vector<LayerShape>& head_layers(std::size_t k) const { return heads_.at(k); }
  LayerView extractor_layer(std::size_t l);
  LayerView head_layer(std::size_t k, std::size_t l);

  // L x h; row c-1 is (P_k M_c)^T.
  const Matrix& class_embeddings(std::size_t k) const { return class_embeddings_.at(k); }

  std::vector<double> features(std::span<const double> x) const;
  std::vector<double> head_embedding(std::size_t k, std::span<const double> features) const;
  // K embeddings v_1..v_K of one instance.
  std::vector<std::vector<double>> forward(std::span<const double> x) const;
  // <v, P_k M_c> for every class, using the cached projected attributes.
  std::vector<double> head_scores(std::size_t k, std::span<const double> embedding) const;

 private:
  LayerView view(const LayerShape& s);

  ModelArchitecture arch_;
  ProjectionSet projections_;
  AttributeMatrix attributes_;
  std::vector<Matrix> class_embeddings_;
  std::vector<LayerShape> extractor_;
  std::vector<std::vector<LayerShape>> heads_;
  std::vector<double> params_;
};

// score_c = <v, P M_c> for all classes, computed directly from P and M.
std::vector<double> class_scores(std::span<const double> embedding, const Matrix& projection,
                                 const AttributeMatrix& attributes);

// Mean over the batch of sum_k -log softmax(scores_k)[y]. Throws kLabel for a
// label outside 1..L and kData for an empty batch.
double nll_loss(const EnsembleModel& model, std::span<const Example> batch);

// The same loss restricted to one head.
double head_nll_loss(const EnsembleModel& model, std::size_t k,
                     std::span<const Example> batch);

// Loss plus its gradient, written into `grad` (overwritten, same layout as
// the parameters).
double loss_and_gradient(const EnsembleModel& model, std::span<const Example> batch,
                         std::span<double> grad);

std::vector<double> backward(const EnsembleModel& model, std::span<const Example> batch);

struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// `batches` Adam steps on batches drawn uniformly with replacement from
// `data`. Returns the mean batch loss (0 when batches == 0).
double train_epoch(EnsembleModel& model, AdamState& state, std::span<const Example> data,
                   std::size_t batches, std::size_t batch_size, std::uint64_t seed);

// Little-endian binary checkpoint. Header: u64 input_dim, u64 #extractor
// layers, their widths, u64 #head hidden layers, their widths, u64
// head_output_relu, u64 K, u64 h, u64 L, u64 parameter count; then the
// parameters as f64; then Adam: u64 step, f64 lr, beta1, beta2, epsilon, the
// first and second moments as f64.
void save_checkpoint(const std::filesystem::path& path, const EnsembleModel& model,
                     const AdamState& state);

struct Checkpoint {
  EnsembleModel model;
  AdamState optimizer;
};

// Projections and attributes are stored separately and must match the
// header.
Checkpoint load_checkpoint(const std::filesystem::path& path, ProjectionSet projections,
                           AttributeMatrix attributes);

}  // namespace pren
