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

#include "pren/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>

#include "pren/error.hpp"
#include "pren/fileio.hpp"

namespace pren {
namespace {

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(const std::string& text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t number = 0;
  for (std::string_view line : split_on(text, '\n')) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    out.emplace_back(number, line);
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// "key=value key=value" header; returns values in the requested key order.
std::vector<std::int64_t> parse_header(std::string_view line, const std::vector<std::string>& keys,
                                       const std::string& at) {
  std::vector<std::int64_t> values;
  std::vector<std::string_view> fields;
  for (std::string_view f : split_on(trim(line), ' ')) {
    if (!f.empty()) fields.push_back(f);
  }
  require(fields.size() == keys.size(), ErrorKind::kValidation,
          at + ": expected header with " + std::to_string(keys.size()) + " fields");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::size_t eq = fields[i].find('=');
    require(eq != std::string_view::npos && fields[i].substr(0, eq) == keys[i],
            ErrorKind::kValidation, at + ": expected '" + keys[i] + "=' in header");
    const std::int64_t v = parse_int(fields[i].substr(eq + 1), at + " header " + keys[i]);
    require(v >= 0, ErrorKind::kValidation, at + ": negative " + keys[i]);
    values.push_back(v);
  }
  return values;
}

std::vector<double> parse_vector(std::string_view text, std::size_t expected,
                                 const std::string& at) {
  std::vector<double> out;
  for (std::string_view f : split_on(text, ',')) out.push_back(parse_double(trim(f), at));
  require(out.size() == expected, ErrorKind::kValidation,
          at + ": row has " + std::to_string(out.size()) + " values, header says " +
              std::to_string(expected));
  return out;
}

std::string join_vector(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string join_ids(const std::vector<ClassId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

void FeatureDataset::add(InstanceId id, std::span<const double> x, std::optional<ClassId> label) {
  if (ids.empty() && dim == 0) dim = x.size();
  require(x.size() == dim, ErrorKind::kDimension,
          "instance " + std::to_string(id) + " has " + std::to_string(x.size()) +
              " features, dataset has " + std::to_string(dim));
  if (features.rows() == 0) features = Matrix(0, dim);
  features.append_row(x);
  ids.push_back(id);
  labels.push_back(label);
}

void FeatureDataset::validate(std::size_t num_classes) const {
  require(features.rows() == ids.size() && features.cols() == dim &&
              labels.size() == ids.size(),
          ErrorKind::kValidation, "dataset fields have inconsistent sizes");
  require(features.all_finite(), ErrorKind::kValidation, "dataset has a non-finite feature");
  std::set<InstanceId> unique(ids.begin(), ids.end());
  require(unique.size() == ids.size(), ErrorKind::kValidation, "dataset has duplicate ids");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    require(*labels[i] >= 1 && static_cast<std::size_t>(*labels[i]) <= num_classes,
            ErrorKind::kValidation,
            "instance " + std::to_string(ids[i]) + " has label " + std::to_string(*labels[i]) +
                " outside 1.." + std::to_string(num_classes));
  }
}

std::optional<ClassId> LabelOracle::find(InstanceId id) const {
  const auto it = labels_.find(id);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::vector<ClassId> LabelOracle::labels_for(const FeatureDataset& data) const {
  std::vector<ClassId> out;
  out.reserve(data.size());
  for (InstanceId id : data.ids) {
    const auto label = find(id);
    require(label.has_value(), ErrorKind::kValidation,
            "no hidden label for instance " + std::to_string(id));
    out.push_back(*label);
  }
  return out;
}

void save_features(const std::filesystem::path& path, const FeatureDataset& data) {
  std::string out = "dim=" + std::to_string(data.dim) + " count=" + std::to_string(data.size()) + "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.ids[i]);
    out += '\t';
    out += data.labels[i] ? std::to_string(*data.labels[i]) : "?";
    out += '\t';
    out += join_vector(data.features.row(i));
    out += '\n';
  }
  write_file_atomic(path, out);
}

FeatureDataset load_features(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  require(!lines.empty(), ErrorKind::kValidation, path.string() + ": empty file");
  const auto header = parse_header(lines[0].second, {"dim", "count"}, where(path, lines[0].first));
  const std::size_t dim = static_cast<std::size_t>(header[0]);
  const std::size_t count = static_cast<std::size_t>(header[1]);
  require(dim >= 1, ErrorKind::kValidation, where(path, lines[0].first) + ": dim must be positive");
  require(lines.size() - 1 == count, ErrorKind::kValidation,
          path.string() + ": header count=" + std::to_string(count) + " but " +
              std::to_string(lines.size() - 1) + " rows");

  FeatureDataset data;
  data.dim = dim;
  data.provenance = path.string();
  std::vector<double> entries;
  entries.reserve(dim * count);
  std::set<InstanceId> seen_ids;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string at = where(path, lines[r].first);
    const auto fields = split_on(lines[r].second, '\t');
    require(fields.size() == 3, ErrorKind::kValidation,
            at + ": expected id, label and values separated by tabs");
    const InstanceId id = parse_int(trim(fields[0]), at + " id");
    require(seen_ids.insert(id).second, ErrorKind::kValidation,
            at + ": duplicate instance id " + std::to_string(id));
    std::optional<ClassId> label;
    if (trim(fields[1]) != "?") {
      label = static_cast<ClassId>(parse_int(trim(fields[1]), at + " label"));
    }
    const std::vector<double> x = parse_vector(fields[2], dim, at);
    entries.insert(entries.end(), x.begin(), x.end());
    data.ids.push_back(id);
    data.labels.push_back(label);
  }
  data.features = Matrix(count, dim, std::move(entries));
  return data;
}

void save_attributes(const std::filesystem::path& path, const AttributeMatrix& attributes) {
  std::string out = "dim=" + std::to_string(attributes.dim()) +
                    " count=" + std::to_string(attributes.num_classes()) + "\n";
  for (ClassId c = 1; c <= static_cast<ClassId>(attributes.num_classes()); ++c) {
    out += std::to_string(c) + '\t' + join_vector(attributes.column(c)) + '\n';
  }
  write_file_atomic(path, out);
}

AttributeMatrix load_attributes(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  require(!lines.empty(), ErrorKind::kValidation, path.string() + ": empty file");
  const auto header = parse_header(lines[0].second, {"dim", "count"}, where(path, lines[0].first));
  const std::size_t m = static_cast<std::size_t>(header[0]);
  const std::size_t classes = static_cast<std::size_t>(header[1]);
  require(m >= 1 && classes >= 1, ErrorKind::kValidation,
          where(path, lines[0].first) + ": dim and count must be positive");
  require(lines.size() - 1 == classes, ErrorKind::kValidation,
          path.string() + ": header count=" + std::to_string(classes) + " but " +
              std::to_string(lines.size() - 1) + " rows");
  Matrix values(m, classes);
  std::vector<bool> present(classes, false);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string at = where(path, lines[r].first);
    const auto fields = split_on(lines[r].second, '\t');
    require(fields.size() == 2, ErrorKind::kValidation,
            at + ": expected class id and values separated by a tab");
    const std::int64_t c = parse_int(trim(fields[0]), at + " class id");
    require(c >= 1 && static_cast<std::size_t>(c) <= classes, ErrorKind::kValidation,
            at + ": class id " + std::to_string(c) + " outside 1.." + std::to_string(classes));
    require(!present[static_cast<std::size_t>(c - 1)], ErrorKind::kValidation,
            at + ": class " + std::to_string(c) + " listed twice");
    present[static_cast<std::size_t>(c - 1)] = true;
    const std::vector<double> a = parse_vector(fields[1], m, at);
    const bool all_zero = std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; });
    require(!all_zero, ErrorKind::kValidation,
            at + ": attribute vector of class " + std::to_string(c) + " is all zero");
    for (std::size_t i = 0; i < m; ++i) values(i, static_cast<std::size_t>(c - 1)) = a[i];
  }
  return AttributeMatrix(std::move(values));
}

void save_split(const std::filesystem::path& path, const ClassSplit& split) {
  write_file_atomic(path, "seen: " + join_ids(split.seen()) + "\nunseen: " +
                              join_ids(split.unseen()) + "\n");
}

ClassSplit load_split(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::optional<std::vector<ClassId>> seen;
  std::optional<std::vector<ClassId>> unseen;
  for (const auto& [number, line] : lines_of(text)) {
    const std::string at = where(path, number);
    const std::size_t colon = line.find(':');
    require(colon != std::string_view::npos, ErrorKind::kValidation,
            at + ": expected 'seen:' or 'unseen:'");
    const std::string_view key = trim(line.substr(0, colon));
    std::vector<ClassId> ids;
    const std::string_view rest = trim(line.substr(colon + 1));
    if (!rest.empty()) {
      for (std::string_view f : split_on(rest, ',')) {
        ids.push_back(static_cast<ClassId>(parse_int(trim(f), at + " class id")));
      }
    }
    if (key == "seen") {
      require(!seen, ErrorKind::kValidation, at + ": duplicate 'seen:' line");
      seen = std::move(ids);
    } else if (key == "unseen") {
      require(!unseen, ErrorKind::kValidation, at + ": duplicate 'unseen:' line");
      unseen = std::move(ids);
    } else {
      fail(ErrorKind::kValidation, at + ": unknown key '" + std::string(key) + "'");
    }
  }
  require(seen && unseen, ErrorKind::kValidation,
          path.string() + ": needs both 'seen:' and 'unseen:' lines");
  return ClassSplit(std::move(*seen), std::move(*unseen));
}

void save_labels(const std::filesystem::path& path, const LabelOracle& oracle) {
  std::string out = "count=" + std::to_string(oracle.size()) + "\n";
  for (const auto& [id, label] : oracle.entries()) {
    out += std::to_string(id) + '\t' + std::to_string(label) + '\n';
  }
  write_file_atomic(path, out);
}

LabelOracle load_labels(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  require(!lines.empty(), ErrorKind::kValidation, path.string() + ": empty file");
  const auto header = parse_header(lines[0].second, {"count"}, where(path, lines[0].first));
  require(lines.size() - 1 == static_cast<std::size_t>(header[0]), ErrorKind::kValidation,
          path.string() + ": header count does not match the number of rows");
  LabelOracle oracle;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string at = where(path, lines[r].first);
    const auto fields = split_on(lines[r].second, '\t');
    require(fields.size() == 2, ErrorKind::kValidation, at + ": expected id<TAB>label");
    const InstanceId id = parse_int(trim(fields[0]), at + " id");
    require(!oracle.find(id), ErrorKind::kValidation,
            at + ": duplicate id " + std::to_string(id));
    oracle.set(id, static_cast<ClassId>(parse_int(trim(fields[1]), at + " label")));
  }
  return oracle;
}

LoadedData load_dataset(const std::filesystem::path& features_path,
                        const std::filesystem::path& labels_path,
                        const std::filesystem::path& attributes_path,
                        const std::filesystem::path& split_path) {
  LoadedData out{load_features(features_path), load_attributes(attributes_path),
                 load_split(split_path), {}};
  const std::size_t classes = out.attributes.num_classes();
  require(out.split.num_classes() == classes, ErrorKind::kValidation,
          split_path.string() + ": split covers " + std::to_string(out.split.num_classes()) +
              " classes, attributes have " + std::to_string(classes));
  out.dataset.validate(classes);
  for (std::size_t i = 0; i < out.dataset.size(); ++i) {
    const auto& label = out.dataset.labels[i];
    require(!label || out.split.is_seen(*label), ErrorKind::kValidation,
            features_path.string() + ": labeled instance " + std::to_string(out.dataset.ids[i]) +
                " has unseen class " + (label ? std::to_string(*label) : std::string()) +
                "; unseen-class labels belong in the labels file");
  }
  if (!labels_path.empty()) {
    out.oracle = load_labels(labels_path);
    std::set<InstanceId> unlabeled;
    for (std::size_t i = 0; i < out.dataset.size(); ++i) {
      if (!out.dataset.labels[i]) unlabeled.insert(out.dataset.ids[i]);
    }
    for (const auto& [id, label] : out.oracle.entries()) {
      require(unlabeled.count(id) == 1, ErrorKind::kValidation,
              labels_path.string() + ": id " + std::to_string(id) +
                  " is not an unlabeled instance of the features file");
      require(label >= 1 && static_cast<std::size_t>(label) <= classes, ErrorKind::kValidation,
              labels_path.string() + ": label " + std::to_string(label) + " of id " +
                  std::to_string(id) + " outside 1.." + std::to_string(classes));
    }
  }
  return out;
}

TransductiveTask to_task(const LoadedData& data) {
  TransductiveTask task{{}, {}, data.attributes, data.split};
  task.labeled.dim = task.unlabeled.dim = data.dataset.dim;
  task.labeled.provenance = data.dataset.provenance + " (labeled)";
  task.unlabeled.provenance = data.dataset.provenance + " (unlabeled)";
  std::vector<double> labeled_x;
  std::vector<double> unlabeled_x;
  for (std::size_t i = 0; i < data.dataset.size(); ++i) {
    const auto row = data.dataset.features.row(i);
    if (data.dataset.labels[i]) {
      task.labeled.ids.push_back(data.dataset.ids[i]);
      task.labeled.labels.push_back(data.dataset.labels[i]);
      labeled_x.insert(labeled_x.end(), row.begin(), row.end());
    } else {
      task.unlabeled.ids.push_back(data.dataset.ids[i]);
      task.unlabeled.labels.push_back(std::nullopt);
      unlabeled_x.insert(unlabeled_x.end(), row.begin(), row.end());
    }
  }
  task.labeled.features = Matrix(task.labeled.ids.size(), data.dataset.dim, std::move(labeled_x));
  task.unlabeled.features =
      Matrix(task.unlabeled.ids.size(), data.dataset.dim, std::move(unlabeled_x));
  return task;
}

TaskFiles::TaskFiles(const std::filesystem::path& dir)
    : features(dir / "features.txt"),
      labels(dir / "labels.txt"),
      attributes(dir / "attributes.txt"),
      split(dir / "split.txt") {}

void save_task(const std::filesystem::path& dir, const TransductiveTask& task,
               const LabelOracle& oracle) {
  std::filesystem::create_directories(dir);
  const TaskFiles files(dir);
  FeatureDataset combined = task.labeled;
  std::vector<double> entries(task.labeled.features.data().begin(),
                              task.labeled.features.data().end());
  entries.insert(entries.end(), task.unlabeled.features.data().begin(),
                 task.unlabeled.features.data().end());
  combined.ids.insert(combined.ids.end(), task.unlabeled.ids.begin(), task.unlabeled.ids.end());
  combined.labels.insert(combined.labels.end(), task.unlabeled.size(), std::nullopt);
  combined.features = Matrix(combined.ids.size(), task.labeled.dim, std::move(entries));
  save_features(files.features, combined);
  save_labels(files.labels, oracle);
  save_attributes(files.attributes, task.attributes);
  save_split(files.split, task.split);
}

LoadedData load_task(const std::filesystem::path& dir) {
  const TaskFiles files(dir);
  const std::filesystem::path labels =
      std::filesystem::exists(files.labels) ? files.labels : std::filesystem::path();
  return load_dataset(files.features, labels, files.attributes, files.split);
}

}  // namespace pren
