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

#include <sstream>
#include <string>
#include <vector>

#include "pren/cli.hpp"
#include "pren/fileio.hpp"
#include "test_util.hpp"

using namespace pren;
using namespace pren::testing;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pren");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

// A small task and settings that train in well under a second.
std::string make_task(const TempDir& dir, const std::string& name, const char* holdout = "0") {
  const std::string path = (dir / name).string();
  const Outcome r = run_cli({"synth", "--out", path, "--seed", "5", "--classes", "8", "--seen",
                             "5", "--attr-dim", "10", "--feat-dim", "12", "--per-class", "12",
                             "--seen-holdout", holdout});
  REQUIRE(r.code == 0);
  return path;
}

std::vector<std::string> quick(std::vector<std::string> args) {
  for (const char* kv : {"K=4", "h=4", "max_iter=2", "batches_per_iter=5", "init_epochs=1"}) {
    args.push_back("--set");
    args.push_back(kv);
  }
  args.push_back("--preset");
  args.push_back("desk");
  return args;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth, train and eval pipeline") {
  TempDir dir("cli_pipeline");
  const std::string data = make_task(dir, "task");
  CHECK(std::filesystem::exists(dir / "task" / "features.txt"));
  CHECK(std::filesystem::exists(dir / "task" / "labels.txt"));

  const std::string run = (dir / "run").string();
  const Outcome t = run_cli(quick({"train", "--data", data, "--out", run}));
  REQUIRE_MESSAGE(t.code == 0, t.err);
  CHECK(t.out.find("trained 4 classifiers for 2 iterations") != std::string::npos);
  for (const char* f : {"model.ckpt", "projections.bin", "history.tsv", "config.cfg",
                        "manifest.txt"}) {
    CHECK(std::filesystem::exists(dir / "run" / f));
  }

  const Outcome e = run_cli({"eval", "--run", run});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  const std::string metrics = read_file(dir / "run" / "metrics.txt");
  CHECK(metrics.rfind("per_class_top1=", 0) == 0);
  const double top1 = parse_double(metrics.substr(15, metrics.find('\n') - 15), "top1");
  CHECK(top1 >= 0.0);
  CHECK(top1 <= 1.0);
  CHECK(e.out == read_file(dir / "run" / "report.txt"));

  const std::string proj = (dir / "p.bin").string();
  const Outcome p = run_cli(quick({"project", "--data", data, "--out", proj}));
  REQUIRE_MESSAGE(p.code == 0, p.err);
  CHECK(read_file(proj) == read_file(dir / "run" / "projections.bin"));
}

TEST_CASE("identical runs write identical outputs") {
  TempDir dir("cli_repeat");
  const std::string data = make_task(dir, "task");
  for (const char* name : {"a", "b"}) {
    REQUIRE(run_cli(quick({"train", "--data", data, "--out", (dir / name).string()})).code == 0);
    REQUIRE(run_cli({"eval", "--run", (dir / name).string()}).code == 0);
  }
  for (const char* f : {"metrics.txt", "history.tsv", "model.ckpt"}) {
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
}

TEST_CASE("config file and overrides") {
  TempDir dir("cli_config");
  const std::string data = make_task(dir, "task");
  write_file_atomic(dir / "run.cfg", "# small\nK=3\nh=4\nmax_iter=1\nbatches_per_iter=4\n"
                                     "init_epochs=1\nextractor_widths=identity\nhead_hidden=16\n");
  const Outcome t = run_cli({"train", "--data", data, "--out", (dir / "run").string(), "--config",
                             (dir / "run.cfg").string(), "--set", "K=2"});
  REQUIRE_MESSAGE(t.code == 0, t.err);
  const std::string saved = read_file(dir / "run" / "config.cfg");
  CHECK(saved.find("K=2\n") != std::string::npos);
  CHECK(saved.find("head_hidden=16\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir dir("cli_errors");
  const Outcome unknown = run_cli({"train", "--bogus"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  CHECK(run_cli({}).code == kExitUsage);
  CHECK(run_cli({"train", "--data", (dir / "nowhere").string(), "--out", "x"}).code ==
        kExitUsage);
  CHECK(run_cli({"eval", "--run", (dir / "nowhere").string()}).code == kExitUsage);
  CHECK(run_cli({"--help"}).code == kExitOk);

  const std::string data = make_task(dir, "task");
  const Outcome bad_key = run_cli({"train", "--data", data, "--out", (dir / "r").string(),
                                   "--set", "no_such_key=1"});
  CHECK(bad_key.code == kExitValidation);
  CHECK(bad_key.err.find("no_such_key") != std::string::npos);

  write_file_atomic(dir / "bad.cfg", "K=2\nK = x\n");
  const Outcome bad_file = run_cli({"train", "--data", data, "--out", (dir / "r").string(),
                                    "--config", (dir / "bad.cfg").string()});
  CHECK(bad_file.code == kExitValidation);
  CHECK(bad_file.err.find("bad.cfg:2") != std::string::npos);

  CHECK(run_cli({"train", "--data", data, "--out", (dir / "r").string(), "--set", "K"}).code ==
        kExitUsage);
  CHECK(run_cli({"sweep", "--data", data, "--param", "rho", "--values", "1"}).code ==
        kExitUsage);

  write_file_atomic(dir / "task" / "split.txt", "seen: 1,2\nunseen: 2\n");
  CHECK(run_cli(quick({"train", "--data", data, "--out", (dir / "r").string()})).code ==
        kExitValidation);
}

TEST_CASE("sweep and ablate tables") {
  TempDir dir("cli_tables");
  const std::string data = make_task(dir, "task");
  const Outcome s = run_cli(quick({"sweep", "--data", data, "--param", "h", "--values",
                                   "2,4,6,8", "--out", (dir / "sweep.tsv").string()}));
  REQUIRE_MESSAGE(s.code == 0, s.err);
  CHECK(count_lines(s.out) == 5);
  CHECK(s.out.rfind("h\tper_class_top1\tmacc\n", 0) == 0);
  CHECK(s.out.find("\n8\t") != std::string::npos);
  CHECK(read_file(dir / "sweep.tsv") == s.out);

  const Outcome a = run_cli(quick({"ablate", "--data", data}));
  REQUIRE_MESSAGE(a.code == 0, a.err);
  CHECK(count_lines(a.out) == 4);
  CHECK(a.out.find("\nsingle_classifier\t") != std::string::npos);
  CHECK(a.out.find("\nno_projection\t") != std::string::npos);
}

TEST_CASE("generalized run reports all five numbers") {
  TempDir dir("cli_gzsl");
  const std::string data = make_task(dir, "task", "0.25");
  const std::string run = (dir / "run").string();
  const Outcome t = run_cli(quick({"train", "--data", data, "--out", run, "--set",
                                   "gzsl_mode=true"}));
  REQUIRE_MESSAGE(t.code == 0, t.err);
  REQUIRE(run_cli({"eval", "--run", run}).code == 0);
  const std::string metrics = read_file(dir / "run" / "metrics.txt");
  for (const char* key : {"per_class_top1=", "macc=", "\nu=", "\ns=", "\nh="}) {
    CHECK(metrics.find(key) != std::string::npos);
  }
  REQUIRE(run_cli({"eval", "--run", run, "--mode", "zsl"}).code == 0);
  CHECK(read_file(dir / "run" / "metrics.txt").find("\nh=") == std::string::npos);
}

}  // TEST_SUITE
