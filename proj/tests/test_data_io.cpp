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


#include <doctest.h>

#include <cmath>
#include <set>

#include "pren/config.hpp"
#include "pren/dataset.hpp"
#include "pren/fileio.hpp"
#include "pren/synthetic.hpp"
#include "test_util.hpp"

using namespace pren;
using namespace pren::testing;

namespace {

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("data_io") {

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e308, 123456789.0, 0.0}) {
    CHECK(parse_double(format_double(x), "x") == x);
  }
  CHECK(parse_int("-42", "n") == -42);
  CHECK_ERROR_KIND(parse_double("1.5abc", "x"), ErrorKind::kValidation);
  CHECK_ERROR_KIND(parse_int("", "n"), ErrorKind::kValidation);
  CHECK_ERROR_KIND(parse_double("nan", "x"), ErrorKind::kValidation);
}

TEST_CASE("binary reader detects truncation") {
  BinaryWriter w;
  w.u64(7);
  w.f64(-0.25);
  BinaryReader r(w.bytes(), "mem");
  CHECK(r.u64() == 7);
  CHECK(r.f64() == -0.25);
  CHECK(r.at_end());
  BinaryReader short_reader(w.bytes().substr(0, 10), "mem");
  short_reader.u64();
  CHECK_ERROR_KIND(short_reader.f64(), ErrorKind::kValidation);
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  TempDir dir("io");
  write_file_atomic(dir / "a.txt", "one");
  write_file_atomic(dir / "a.txt", "two");
  CHECK(read_file(dir / "a.txt") == "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
  CHECK_ERROR_KIND(read_file(dir / "missing.txt"), ErrorKind::kIo);
}

TEST_CASE("synthetic generator") {
  SyntheticSpec spec;
  spec.seed = 4;
  const SyntheticTask task = generate_synthetic(spec);
  CHECK(task.data.size() == 600);
  CHECK(task.data.dim == 30);
  CHECK(task.split.seen().size() == 10);
  CHECK(task.split.unseen() == std::vector<ClassId>{11, 12, 13, 14, 15});
  std::set<std::vector<double>> distinct;
  for (ClassId c = 1; c <= 15; ++c) {
    const auto a = task.attributes.column(c);
    for (double x : a) CHECK((x == 0.0 || x == 1.0));
    distinct.insert(a);
  }
  CHECK(distinct.size() == 15);
  task.data.validate(15);

  const SyntheticTask again = generate_synthetic(spec);
  CHECK(again.data == task.data);
  CHECK(again.attributes == task.attributes);

  spec.noise_sigma = 0.0;
  const SyntheticTask clean = generate_synthetic(spec);
  for (std::size_t i = 0; i < clean.data.size(); ++i) {
    const auto a = clean.attributes.column(*clean.data.labels[i]);
    for (std::size_t r = 0; r < clean.data.dim; ++r) {
      double p = 0.0;
      for (std::size_t q = 0; q < a.size(); ++q) p += clean.mixing(r, q) * a[q];
      CHECK(clean.data.features(i, r) == doctest::Approx(p).epsilon(1e-12));
    }
  }

  SyntheticSpec tiny;
  tiny.attribute_dim = 3;  // only 7 nonzero binary vectors for 15 classes
  CHECK_ERROR_KIND(generate_synthetic(tiny), ErrorKind::kArgument);
  SyntheticSpec bad;
  bad.num_seen = 15;
  CHECK_ERROR_KIND(generate_synthetic(bad), ErrorKind::kArgument);
}

TEST_CASE("transductive split hides unseen labels and holds out seen instances") {
  SyntheticSpec spec;
  spec.seed = 2;
  const SyntheticTask task = generate_synthetic(spec);
  const auto [zsl, zsl_oracle] = make_transductive(task, 0.0, 2);
  CHECK(zsl.labeled.size() == 400);
  CHECK(zsl.unlabeled.size() == 200);
  CHECK(zsl_oracle.size() == 200);
  for (const auto& label : zsl.unlabeled.labels) CHECK_FALSE(label.has_value());
  for (const auto& [id, label] : zsl_oracle.entries()) CHECK(task.split.is_unseen(label));

  const auto [mixed, mixed_oracle] = make_transductive(task, 0.2, 2);
  CHECK(mixed.labeled.size() == 320);
  CHECK(mixed.unlabeled.size() == 280);
  std::size_t seen_hidden = 0;
  for (const auto& [id, label] : mixed_oracle.entries()) seen_hidden += task.split.is_seen(label);
  CHECK(seen_hidden == 80);
}

TEST_CASE("task files round-trip") {
  SyntheticSpec spec;
  spec.seed = 8;
  spec.instances_per_class = 6;
  const auto [task, oracle] = make_transductive(generate_synthetic(spec), 0.25, 8);
  TempDir dir("task");
  save_task(dir.path(), task, oracle);
  const LoadedData loaded = load_task(dir.path());
  const TransductiveTask back = to_task(loaded);
  CHECK(back.labeled == task.labeled);
  CHECK(back.unlabeled == task.unlabeled);
  CHECK(back.attributes == task.attributes);
  CHECK(back.split == task.split);
  CHECK(loaded.oracle == oracle);

  // the labels file is optional
  std::filesystem::remove(dir / "labels.txt");
  const LoadedData unlabeled_only = load_task(dir.path());
  CHECK(unlabeled_only.oracle.size() == 0);
  CHECK(to_task(unlabeled_only).unlabeled == task.unlabeled);
}

TEST_CASE("malformed feature files name the offending line") {
  TempDir dir("bad");
  write_file_atomic(dir / "f.txt", "dim=3 count=2\n0\t1\t1,2,3\n1\t2\t1,2\n");
  const std::string msg = error_text([&] { load_features(dir / "f.txt"); });
  CHECK(msg.find("f.txt:3") != std::string::npos);
  CHECK_ERROR_KIND(load_features(dir / "f.txt"), ErrorKind::kValidation);

  write_file_atomic(dir / "g.txt", "dim=2 count=2\n0\t1\t1,2\n0\t2\t3,4\n");
  CHECK(error_text([&] { load_features(dir / "g.txt"); }).find("g.txt:3") != std::string::npos);

  write_file_atomic(dir / "h.txt", "dim=2 count=3\n0\t1\t1,2\n");
  CHECK_ERROR_KIND(load_features(dir / "h.txt"), ErrorKind::kValidation);

  write_file_atomic(dir / "i.txt", "dims=2 count=1\n0\t1\t1,2\n");
  CHECK(error_text([&] { load_features(dir / "i.txt"); }).find("i.txt:1") != std::string::npos);
}

TEST_CASE("attribute and split file validation") {
  TempDir dir("attr");
  write_file_atomic(dir / "a.txt", "dim=2 count=2\n1\t1,0\n2\t0,0\n");
  CHECK_ERROR_KIND(load_attributes(dir / "a.txt"), ErrorKind::kValidation);
  write_file_atomic(dir / "b.txt", "dim=2 count=2\n1\t1,0\n1\t0,1\n");
  CHECK_ERROR_KIND(load_attributes(dir / "b.txt"), ErrorKind::kValidation);
  write_file_atomic(dir / "s.txt", "seen: 1,2\nunseen: 2,3\n");
  CHECK_ERROR_KIND(load_split(dir / "s.txt"), ErrorKind::kValidation);
  write_file_atomic(dir / "t.txt", "seen: 1\nextra: 3\n");
  CHECK(error_text([&] { load_split(dir / "t.txt"); }).find("t.txt:2") != std::string::npos);
}

TEST_CASE("dataset consistency checks") {
  SyntheticSpec spec;
  spec.instances_per_class = 3;
  const auto [task, oracle] = make_transductive(generate_synthetic(spec), 0.0, 0);
  TempDir dir("consistency");
  save_task(dir.path(), task, oracle);
  const TaskFiles files(dir.path());

  FeatureDataset combined = task.labeled;
  combined.add(9999, task.unlabeled.features.row(0), task.split.unseen()[0]);
  for (std::size_t i = 1; i < task.unlabeled.size(); ++i) {
    combined.add(task.unlabeled.ids[i], task.unlabeled.features.row(i), std::nullopt);
  }
  save_features(files.features, combined);
  CHECK_ERROR_KIND(load_dataset(files.features, "", files.attributes, files.split),
                   ErrorKind::kValidation);

  save_task(dir.path(), task, oracle);
  LabelOracle stray = oracle;
  stray.set(task.labeled.ids[0], task.split.unseen()[0]);
  save_labels(files.labels, stray);
  CHECK_ERROR_KIND(load_dataset(files.features, files.labels, files.attributes, files.split),
                   ErrorKind::kValidation);

  FeatureDataset d;
  d.dim = 2;
  CHECK_ERROR_KIND((d.add(1, std::vector<double>{1.0}, std::nullopt)), ErrorKind::kDimension);
  d.add(1, std::vector<double>{1.0, 2.0}, 1);
  d.add(1, std::vector<double>{1.0, 2.0}, 1);
  CHECK_ERROR_KIND(d.validate(3), ErrorKind::kValidation);
}

TEST_CASE("config files") {
  const TrainConfig c = parse_config(
      "# desk run\nK = 7\nh=5\nhead_hidden=32,16\nextractor_widths=identity\n"
      "t_unseen_only=3\ngzsl_mode=true\nrho=0.5  # inline comment\n");
  CHECK(c.K == 7);
  CHECK(c.h == 5);
  CHECK(c.head_hidden == std::vector<std::size_t>{32, 16});
  CHECK(c.extractor_widths == std::vector<std::size_t>{});
  CHECK(c.t_unseen_only == 3u);
  CHECK(c.gzsl_mode);
  CHECK(c.rho == 0.5);
  CHECK(parse_config(format_config(c)) == c);
  CHECK(parse_config(format_config(TrainConfig{})) == TrainConfig{});
  CHECK(parse_config(format_config(desk_config())) == desk_config());

  CHECK_ERROR_KIND(parse_config("K=3\nkk=4\n"), ErrorKind::kValidation);
  CHECK(error_text([] { parse_config("K=3\nkk=4\n", {}, "run.cfg"); }).find("run.cfg:2") !=
        std::string::npos);
  CHECK_ERROR_KIND(parse_config("gzsl_mode=maybe\n"), ErrorKind::kValidation);
  CHECK_ERROR_KIND(parse_config("K\n"), ErrorKind::kValidation);
  CHECK_ERROR_KIND(parse_config("K=-1\n"), ErrorKind::kValidation);
}

}  // TEST_SUITE
