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

#include "pren/config.hpp"

#include "pren/error.hpp"
#include "pren/fileio.hpp"

namespace pren {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::size_t to_count(std::string_view v, std::string_view key) {
  const std::int64_t x = parse_int(v, key);
  require(x >= 0, ErrorKind::kValidation, std::string(key) + " must be non-negative");
  return static_cast<std::size_t>(x);
}

bool to_bool(std::string_view v, std::string_view key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorKind::kValidation, std::string(key) + ": expected true or false, got '" +
                                   std::string(v) + "'");
}

std::vector<std::size_t> to_widths(std::string_view v, std::string_view key) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = std::min(v.find(',', start), v.size());
    out.push_back(to_count(trim(v.substr(start, comma - start)), key));
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (k == "K") c.K = to_count(value, key);
  else if (k == "h") c.h = to_count(value, key);
  else if (k == "max_iter") c.max_iter = to_count(value, key);
  else if (k == "batches_per_iter") c.batches_per_iter = to_count(value, key);
  else if (k == "batch_size") c.batch_size = to_count(value, key);
  else if (k == "rho") c.rho = parse_double(value, key);
  else if (k == "n_max") c.n_max = to_count(value, key);
  else if (k == "learning_rate") c.learning_rate = parse_double(value, key);
  else if (k == "beta1") c.beta1 = parse_double(value, key);
  else if (k == "beta2") c.beta2 = parse_double(value, key);
  else if (k == "epsilon") c.epsilon = parse_double(value, key);
  else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_count(value, key));
  else if (k == "gzsl_mode") c.gzsl_mode = to_bool(value, key);
  else if (k == "t_unseen_only") {
    if (value == "auto") c.t_unseen_only.reset();
    else c.t_unseen_only = to_count(value, key);
  } else if (k == "single_classifier") c.single_classifier = to_bool(value, key);
  else if (k == "no_projection") c.no_projection = to_bool(value, key);
  else if (k == "init_epochs") c.init_epochs = to_count(value, key);
  else if (k == "extractor_widths") {
    if (value == "auto") c.extractor_widths.reset();
    else if (value == "identity") c.extractor_widths = std::vector<std::size_t>{};
    else c.extractor_widths = to_widths(value, key);
  } else if (k == "head_hidden") {
    c.head_hidden = value == "none" ? std::vector<std::size_t>{} : to_widths(value, key);
  } else if (k == "head_output_relu") c.head_output_relu = to_bool(value, key);
  else if (k == "seen_calibration") c.seen_calibration = parse_double(value, key);
  else fail(ErrorKind::kValidation, "unknown config key '" + k + "'");
}

TrainConfig parse_config(std::string_view text, TrainConfig base, std::string_view source) {
  std::size_t number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++number;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = std::string(source) + ":" + std::to_string(number);
    const std::size_t eq = line.find('=');
    require(eq != std::string_view::npos, ErrorKind::kValidation, at + ": expected key=value");
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(ErrorKind::kValidation, at + ": " + e.what());
    }
  }
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  return parse_config(read_file(path), std::move(base), path.string());
}

std::string format_config(const TrainConfig& c) {
  std::string out;
  auto kv = [&](const char* key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  kv("K", std::to_string(c.K));
  kv("h", std::to_string(c.h));
  kv("max_iter", std::to_string(c.max_iter));
  kv("batches_per_iter", std::to_string(c.batches_per_iter));
  kv("batch_size", std::to_string(c.batch_size));
  kv("rho", format_double(c.rho));
  kv("n_max", std::to_string(c.n_max));
  kv("learning_rate", format_double(c.learning_rate));
  kv("beta1", format_double(c.beta1));
  kv("beta2", format_double(c.beta2));
  kv("epsilon", format_double(c.epsilon));
  kv("seed", std::to_string(c.seed));
  kv("gzsl_mode", flag(c.gzsl_mode));
  kv("t_unseen_only", c.t_unseen_only ? std::to_string(*c.t_unseen_only) : "auto");
  kv("single_classifier", flag(c.single_classifier));
  kv("no_projection", flag(c.no_projection));
  kv("init_epochs", std::to_string(c.init_epochs));
  kv("extractor_widths", !c.extractor_widths          ? std::string("auto")
                         : c.extractor_widths->empty() ? std::string("identity")
                                                       : join(*c.extractor_widths));
  kv("head_hidden", c.head_hidden.empty() ? std::string("none") : join(c.head_hidden));
  kv("head_output_relu", flag(c.head_output_relu));
  kv("seen_calibration", format_double(c.seen_calibration));
  return out;
}

TrainConfig desk_config() {
  TrainConfig c;
  c.K = 10;
  c.h = 8;
  c.max_iter = 10;
  c.init_epochs = 3;
  c.extractor_widths = std::vector<std::size_t>{};
  c.head_hidden = {64};
  return c;
}

}  // namespace pren
