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

#include "pren/ensemble_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pren/error.hpp"
#include "pren/fileio.hpp"
#include "pren/rng.hpp"
#include "pren/simd/kernels.hpp"

namespace pren {
namespace {

void append_layers(std::vector<LayerShape>& layers, std::size_t& offset, std::size_t in,
                   const std::vector<std::size_t>& widths, bool relu_last) {
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const std::size_t out = widths[l];
    require(out >= 1, ErrorKind::kArgument, "layer width must be at least 1");
    LayerShape s{offset, offset + out * in, in, out,
                 l + 1 < widths.size() ? true : relu_last};
    offset += out * in + out;
    layers.push_back(s);
    in = out;
  }
}

// outputs[l] is the post-activation output of layer l.
void forward_layers(std::span<const double> params, const std::vector<LayerShape>& layers,
                    std::span<const double> input,
                    std::vector<std::vector<double>>& outputs) {
  outputs.resize(layers.size());
  std::span<const double> in = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    std::vector<double>& out = outputs[l];
    out.resize(s.out);
    simd::gemv(params.subspan(s.weight_offset, s.out * s.in), s.out, s.in, in, out);
    for (std::size_t i = 0; i < s.out; ++i) {
      out[i] += params[s.bias_offset + i];
      if (s.relu && out[i] < 0.0) out[i] = 0.0;
    }
    in = out;
  }
}

// Back-propagates d_out through the layers, accumulating parameter gradients
// into grad. If d_input is non-null, the gradient with respect to the input
// is accumulated into it.
void backward_layers(std::span<const double> params, const std::vector<LayerShape>& layers,
                     std::span<const double> input,
                     const std::vector<std::vector<double>>& outputs,
                     std::vector<double> d_out, std::span<double> grad,
                     std::span<double> d_input) {
  std::vector<double> d_in;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& s = layers[l];
    if (s.relu) {
      for (std::size_t i = 0; i < s.out; ++i) {
        if (outputs[l][i] <= 0.0) d_out[i] = 0.0;
      }
    }
    const std::span<const double> in =
        l == 0 ? input : std::span<const double>(outputs[l - 1]);
    simd::ger_acc(1.0, d_out, in, grad.subspan(s.weight_offset, s.out * s.in));
    for (std::size_t i = 0; i < s.out; ++i) grad[s.bias_offset + i] += d_out[i];
    if (l == 0) {
      if (!d_input.empty()) {
        simd::gemv_t_acc(params.subspan(s.weight_offset, s.out * s.in), s.out, s.in,
                         d_out, d_input);
      }
      break;
    }
    d_in.assign(s.in, 0.0);
    simd::gemv_t_acc(params.subspan(s.weight_offset, s.out * s.in), s.out, s.in, d_out,
                     d_in);
    std::swap(d_out, d_in);
  }
}

// log-sum-exp(scores) - scores[y], with max subtraction.
double softmax_nll(std::span<const double> scores, std::size_t y,
                   std::vector<double>* probabilities) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - peak);
  if (probabilities) {
    probabilities->resize(scores.size());
    for (std::size_t c = 0; c < scores.size(); ++c) {
      (*probabilities)[c] = std::exp(scores[c] - peak) / z;
    }
  }
  return peak + std::log(z) - scores[y];
}

void check_batch(const EnsembleModel& model, std::span<const Example> batch) {
  require(!batch.empty(), ErrorKind::kData, "empty batch");
  for (const Example& e : batch) {
    require(e.label >= 1 && static_cast<std::size_t>(e.label) <= model.num_classes(),
            ErrorKind::kLabel,
            "label " + std::to_string(e.label) + " outside 1.." +
                std::to_string(model.num_classes()));
    require(e.features.size() == model.input_dim(), ErrorKind::kDimension,
            "instance has " + std::to_string(e.features.size()) + " features, model expects " +
                std::to_string(model.input_dim()));
  }
}

void write_architecture(BinaryWriter& w, const EnsembleModel& model) {
  const ModelArchitecture& a = model.architecture();
  w.u64(a.input_dim);
  w.u64(a.extractor_widths.size());
  for (std::size_t x : a.extractor_widths) w.u64(x);
  w.u64(a.head_hidden.size());
  for (std::size_t x : a.head_hidden) w.u64(x);
  w.u64(a.head_output_relu ? 1 : 0);
  w.u64(model.num_heads());
  w.u64(model.embedding_dim());
  w.u64(model.num_classes());
}

}  // namespace

EnsembleModel::EnsembleModel(ModelArchitecture arch, ProjectionSet projections,
                             AttributeMatrix attributes)
    : arch_(std::move(arch)),
      projections_(std::move(projections)),
      attributes_(std::move(attributes)) {
  require(arch_.input_dim >= 1, ErrorKind::kArgument, "input dimension must be positive");
  require(projections_.size() >= 1, ErrorKind::kArgument, "ensemble needs at least one head");
  require(projections_.m == attributes_.dim(), ErrorKind::kDimension,
          "projections expect attribute dimension " + std::to_string(projections_.m) +
              ", attributes have " + std::to_string(attributes_.dim()));

  const Matrix& m = attributes_.values();
  for (const Matrix& p : projections_.projections) {
    require(p.rows() == projections_.h && p.cols() == projections_.m, ErrorKind::kDimension,
            "projection matrix shape does not match h x m");
    class_embeddings_.push_back((p * m).transposed());
  }

  std::size_t offset = 0;
  append_layers(extractor_, offset, arch_.input_dim, arch_.extractor_widths, true);
  std::vector<std::size_t> head_widths = arch_.head_hidden;
  head_widths.push_back(projections_.h);
  for (std::size_t k = 0; k < projections_.size(); ++k) {
    std::vector<LayerShape> layers;
    append_layers(layers, offset, arch_.feature_dim(), head_widths, arch_.head_output_relu);
    heads_.push_back(std::move(layers));
  }
  params_.assign(offset, 0.0);
}

void EnsembleModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  auto init = [&](const LayerShape& s) {
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    for (std::size_t i = 0; i < s.in * s.out; ++i) {
      params_[s.weight_offset + i] = rng.uniform(-limit, limit);
    }
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(s.bias_offset), s.out, 0.0);
  };
  for (const LayerShape& s : extractor_) init(s);
  for (const auto& head : heads_) {
    for (const LayerShape& s : head) init(s);
  }
}

ParamRange EnsembleModel::extractor_range() const {
  if (extractor_.empty()) return {0, 0};
  return {0, extractor_.back().bias_offset + extractor_.back().out};
}

ParamRange EnsembleModel::head_range(std::size_t k) const {
  const std::vector<LayerShape>& head = heads_.at(k);
  const std::size_t begin = head.front().weight_offset;
  return {begin, head.back().bias_offset + head.back().out - begin};
}

LayerView EnsembleModel::view(const LayerShape& s) {
  return {std::span<double>(params_).subspan(s.weight_offset, s.in * s.out),
          std::span<double>(params_).subspan(s.bias_offset, s.out), s.in, s.out};
}

LayerView EnsembleModel::extractor_layer(std::size_t l) { return view(extractor_.at(l)); }

LayerView EnsembleModel::head_layer(std::size_t k, std::size_t l) {
  return view(heads_.at(k).at(l));
}

std::vector<double> EnsembleModel::features(std::span<const double> x) const {
  require(x.size() == arch_.input_dim, ErrorKind::kDimension,
          "instance has " + std::to_string(x.size()) + " features, model expects " +
              std::to_string(arch_.input_dim));
  if (extractor_.empty()) return {x.begin(), x.end()};
  std::vector<std::vector<double>> outputs;
  forward_layers(params_, extractor_, x, outputs);
  return std::move(outputs.back());
}

std::vector<double> EnsembleModel::head_embedding(std::size_t k,
                                                  std::span<const double> feats) const {
  require(feats.size() == feature_dim(), ErrorKind::kDimension, "feature width mismatch");
  std::vector<std::vector<double>> outputs;
  forward_layers(params_, heads_.at(k), feats, outputs);
  return std::move(outputs.back());
}

std::vector<std::vector<double>> EnsembleModel::forward(std::span<const double> x) const {
  const std::vector<double> feats = features(x);
  std::vector<std::vector<double>> out;
  out.reserve(num_heads());
  for (std::size_t k = 0; k < num_heads(); ++k) out.push_back(head_embedding(k, feats));
  return out;
}

std::vector<double> EnsembleModel::head_scores(std::size_t k,
                                               std::span<const double> embedding) const {
  require(embedding.size() == embedding_dim(), ErrorKind::kDimension,
          "embedding width mismatch");
  const Matrix& e = class_embeddings_.at(k);
  std::vector<double> scores(e.rows());
  simd::gemv(e.data(), e.rows(), e.cols(), embedding, scores);
  return scores;
}

std::vector<double> class_scores(std::span<const double> embedding, const Matrix& projection,
                                 const AttributeMatrix& attributes) {
  require(projection.rows() == embedding.size() && projection.cols() == attributes.dim(),
          ErrorKind::kDimension, "class_scores: shapes disagree");
  const Matrix projected = projection * attributes.values();  // h x L
  std::vector<double> scores(attributes.num_classes(), 0.0);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    for (std::size_t r = 0; r < projected.rows(); ++r) {
      scores[c] += embedding[r] * projected(r, c);
    }
  }
  return scores;
}

double head_nll_loss(const EnsembleModel& model, std::size_t k,
                     std::span<const Example> batch) {
  check_batch(model, batch);
  double total = 0.0;
  for (const Example& e : batch) {
    const std::vector<double> v = model.head_embedding(k, model.features(e.features));
    total += softmax_nll(model.head_scores(k, v), static_cast<std::size_t>(e.label - 1),
                         nullptr);
  }
  return total / static_cast<double>(batch.size());
}

double nll_loss(const EnsembleModel& model, std::span<const Example> batch) {
  check_batch(model, batch);
  double total = 0.0;
  for (const Example& e : batch) {
    const std::vector<double> feats = model.features(e.features);
    for (std::size_t k = 0; k < model.num_heads(); ++k) {
      total += softmax_nll(model.head_scores(k, model.head_embedding(k, feats)),
                           static_cast<std::size_t>(e.label - 1), nullptr);
    }
  }
  return total / static_cast<double>(batch.size());
}

double loss_and_gradient(const EnsembleModel& model, std::span<const Example> batch,
                         std::span<double> grad) {
  check_batch(model, batch);
  require(grad.size() == model.parameter_count(), ErrorKind::kDimension,
          "gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);

  const std::span<const double> params = model.parameters();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const std::size_t h = model.embedding_dim();
  const std::size_t classes = model.num_classes();

  std::vector<std::vector<double>> ext_out;
  std::vector<std::vector<double>> head_out;
  std::vector<double> probabilities;
  std::vector<double> scores(classes);
  std::vector<double> d_feat(model.feature_dim());
  double total = 0.0;

  for (const Example& e : batch) {
    std::span<const double> feats = e.features;
    if (!model.extractor_layers().empty()) {
      forward_layers(params, model.extractor_layers(), e.features, ext_out);
      feats = ext_out.back();
    }
    std::fill(d_feat.begin(), d_feat.end(), 0.0);
    const std::size_t y = static_cast<std::size_t>(e.label - 1);

    // Heads in index order so the extractor gradient sums deterministically.
    for (std::size_t k = 0; k < model.num_heads(); ++k) {
      forward_layers(params, model.head_layers(k), feats, head_out);
      const Matrix& emb = model.class_embeddings(k);
      simd::gemv(emb.data(), classes, h, head_out.back(), scores);
      total += softmax_nll(scores, y, &probabilities);
      probabilities[y] -= 1.0;
      for (double& p : probabilities) p *= inv_n;
      std::vector<double> d_embedding(h, 0.0);
      simd::gemv_t_acc(emb.data(), classes, h, probabilities, d_embedding);
      backward_layers(params, model.head_layers(k), feats, head_out, std::move(d_embedding),
                      grad, d_feat);
    }
    if (!model.extractor_layers().empty()) {
      backward_layers(params, model.extractor_layers(), e.features, ext_out, d_feat, grad, {});
    }
  }
  return total * inv_n;
}

std::vector<double> backward(const EnsembleModel& model, std::span<const Example> batch) {
  std::vector<double> grad(model.parameter_count());
  loss_and_gradient(model, batch, grad);
  return grad;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  require(state.m.size() == params.size() && state.v.size() == params.size(),
          ErrorKind::kDimension, "Adam state does not match parameter count");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const simd::AdamCoefficients c{state.learning_rate,
                                 state.beta1,
                                 state.beta2,
                                 state.epsilon,
                                 1.0 - std::pow(state.beta1, t),
                                 1.0 - std::pow(state.beta2, t)};
  simd::adam_update(c, params, grads, state.m, state.v);
}

double train_epoch(EnsembleModel& model, AdamState& state, std::span<const Example> data,
                   std::size_t batches, std::size_t batch_size, std::uint64_t seed) {
  if (batches == 0) return 0.0;
  require(!data.empty(), ErrorKind::kData, "train_epoch: no training data");
  require(batch_size >= 1, ErrorKind::kArgument, "train_epoch: batch size must be positive");
  Rng rng(seed);
  std::vector<Example> batch(batch_size);
  std::vector<double> grad(model.parameter_count());
  double total = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    for (Example& e : batch) e = data[rng.uniform_index(data.size())];
    total += loss_and_gradient(model, batch, grad);
    adam_step(model.parameters(), grad, state);
  }
  return total / static_cast<double>(batches);
}

void save_checkpoint(const std::filesystem::path& path, const EnsembleModel& model,
                     const AdamState& state) {
  BinaryWriter w;
  write_architecture(w, model);
  w.u64(model.parameter_count());
  w.f64s(model.parameters());
  w.u64(state.step);
  w.f64(state.learning_rate);
  w.f64(state.beta1);
  w.f64(state.beta2);
  w.f64(state.epsilon);
  w.f64s(state.m);
  w.f64s(state.v);
  write_file_atomic(path, w.bytes());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, ProjectionSet projections,
                           AttributeMatrix attributes) {
  const std::string source = path.string();
  BinaryReader r(read_file(path), source);
  constexpr std::uint64_t kSane = 1u << 24;
  auto bounded = [&](std::uint64_t x, const char* what) {
    require(x < kSane, ErrorKind::kValidation, source + ": implausible " + what);
    return static_cast<std::size_t>(x);
  };
  ModelArchitecture arch;
  arch.input_dim = bounded(r.u64(), "input dimension");
  arch.extractor_widths.resize(bounded(r.u64(), "extractor depth"));
  for (auto& x : arch.extractor_widths) x = bounded(r.u64(), "layer width");
  arch.head_hidden.resize(bounded(r.u64(), "head depth"));
  for (auto& x : arch.head_hidden) x = bounded(r.u64(), "layer width");
  arch.head_output_relu = r.u64() != 0;
  const std::size_t k = bounded(r.u64(), "head count");
  const std::size_t h = bounded(r.u64(), "embedding width");
  const std::size_t classes = bounded(r.u64(), "class count");
  require(k == projections.size() && h == projections.h, ErrorKind::kValidation,
          source + ": checkpoint K/h do not match the projection set");
  require(classes == attributes.num_classes(), ErrorKind::kValidation,
          source + ": checkpoint class count does not match the attributes");

  EnsembleModel model(std::move(arch), std::move(projections), std::move(attributes));
  require(r.u64() == model.parameter_count(), ErrorKind::kValidation,
          source + ": parameter count does not match the architecture");
  r.f64s(model.parameters());
  AdamState state(model.parameter_count());
  state.step = r.u64();
  state.learning_rate = r.f64();
  state.beta1 = r.f64();
  state.beta2 = r.f64();
  state.epsilon = r.f64();
  r.f64s(state.m);
  r.f64s(state.v);
  r.expect_end();
  return {std::move(model), std::move(state)};
}

}  // namespace pren
