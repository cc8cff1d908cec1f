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

#include "pren/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "pren/config.hpp"
#include "pren/error.hpp"
#include "pren/fileio.hpp"
#include "pren/label_embedding.hpp"
#include "pren/progressive_trainer.hpp"
#include "pren/simd/kernels.hpp"
#include "pren/synthetic.hpp"

namespace fs = std::filesystem;

namespace pren {
namespace {

// Thrown for bad paths and flag values that CLI11 itself cannot check.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingInputs {
  std::string config_path;
  std::string preset = "full";
  std::vector<std::string> overrides;
};

void add_training_inputs(CLI::App* cmd, TrainingInputs& in) {
  cmd->add_option("--config", in.config_path, "key=value training config file");
  cmd->add_option("--preset", in.preset, "base settings before --config: full or desk")
      ->check(CLI::IsMember({"full", "desk"}));
  cmd->add_option("--set", in.overrides, "extra key=value applied after --config");
}

TrainConfig resolve_config(const TrainingInputs& in) {
  TrainConfig config = in.preset == "desk" ? desk_config() : TrainConfig{};
  if (!in.config_path.empty()) {
    if (!fs::exists(in.config_path)) throw UsageError("config file not found: " + in.config_path);
    config = load_config(in.config_path, config);
  }
  for (const std::string& kv : in.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.validate();
  return config;
}

void require_dir(const std::string& dir, const char* what) {
  if (!fs::is_directory(dir)) throw UsageError(std::string(what) + " directory not found: " + dir);
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

EvalMode parse_mode(const std::string& mode) {
  return mode == "gzsl" ? EvalMode::kGzsl : EvalMode::kZsl;
}

TrainResult train_on(const TrainConfig& config, const TransductiveTask& task,
                     const LabelOracle& oracle) {
  const EvalMode mode = config.gzsl_mode ? EvalMode::kGzsl : EvalMode::kZsl;
  const GzslOptions options{config.seen_calibration};
  IterationObserver observer;
  if (oracle.size() > 0) {
    observer = [&](const IterationView& view) -> std::optional<double> {
      const EvalReport r = evaluate_on_task(view.model, task, oracle, mode, options);
      return mode == EvalMode::kGzsl ? r.harmonic : r.per_class_top1;
    };
  }
  return config.gzsl_mode
             ? run_gzsl(config, task.labeled, task.unlabeled, task.attributes, task.split, observer)
             : run(config, task.labeled, task.unlabeled, task.attributes, task.split, observer);
}

std::string fixed6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string result_row(const std::string& name, const EvalReport& r) {
  std::string row = name + '\t' + fixed6(r.per_class_top1) + '\t' + fixed6(r.macc);
  if (r.mode == EvalMode::kGzsl) {
    row += '\t' + fixed6(r.unseen_top1) + '\t' + fixed6(r.seen_top1) + '\t' + fixed6(r.harmonic);
  }
  return row + '\n';
}

std::string result_header(const std::string& first, EvalMode mode) {
  std::string h = first + "\tper_class_top1\tmacc";
  if (mode == EvalMode::kGzsl) h += "\tu\ts\th";
  return h + '\n';
}

}  // namespace

EvalReport evaluate_on_task(const EnsembleModel& model, const TransductiveTask& task,
                            const LabelOracle& oracle, EvalMode mode,
                            const GzslOptions& options) {
  const std::vector<ClassId> all_truth = oracle.labels_for(task.unlabeled);
  Matrix instances(0, task.unlabeled.dim);
  std::vector<ClassId> truth;
  for (std::size_t i = 0; i < task.unlabeled.size(); ++i) {
    if (mode == EvalMode::kZsl && !task.split.is_unseen(all_truth[i])) continue;
    instances.append_row(task.unlabeled.features.row(i));
    truth.push_back(all_truth[i]);
  }
  const std::vector<ClassId> predictions = predict(model, task.split, instances, mode, options);
  return evaluate(predictions, truth, task.split, mode);
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Progressive ensemble networks for transductive zero-shot classification"};
  app.require_subcommand(1);

  // synth
  SyntheticSpec spec;
  std::string synth_out;
  double holdout = 0.0;
  auto* synth = app.add_subcommand("synth", "write a synthetic zero-shot task directory");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--classes", spec.num_classes, "total classes L");
  synth->add_option("--seen", spec.num_seen, "seen classes L_s");
  synth->add_option("--attr-dim", spec.attribute_dim, "attribute dimension m");
  synth->add_option("--feat-dim", spec.feature_dim, "feature dimension d");
  synth->add_option("--per-class", spec.instances_per_class, "instances per class");
  synth->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma");
  synth->add_option("--density", spec.attribute_density, "fraction of 1-attributes");
  synth->add_option("--seen-holdout", holdout,
                    "fraction of each seen class moved to the unlabeled pool (generalized setting)");

  // project
  std::string project_data;
  std::string project_out;
  TrainingInputs project_inputs;
  auto* project = app.add_subcommand("project", "build and save the label-embedding projections");
  project->add_option("--data", project_data, "task directory")->required();
  project->add_option("--out", project_out, "projection file")->required();
  add_training_inputs(project, project_inputs);

  // train
  std::string train_data;
  std::string train_out;
  TrainingInputs train_inputs;
  auto* train = app.add_subcommand("train", "run progressive training");
  train->add_option("--data", train_data, "task directory")->required();
  train->add_option("--out", train_out, "run directory")->required();
  add_training_inputs(train, train_inputs);

  // eval
  std::string eval_run;
  std::string eval_data;
  std::string eval_mode;
  auto* eval = app.add_subcommand("eval", "evaluate a trained run");
  eval->add_option("--run", eval_run, "run directory")->required();
  eval->add_option("--data", eval_data, "task directory (default: the one used for training)");
  eval->add_option("--mode", eval_mode, "zsl or gzsl (default: as trained)")
      ->check(CLI::IsMember({"zsl", "gzsl"}));

  // sweep
  std::string sweep_data;
  std::string sweep_param;
  std::vector<std::size_t> sweep_values;
  std::string sweep_out;
  TrainingInputs sweep_inputs;
  auto* sweep = app.add_subcommand("sweep", "vary K or h and tabulate accuracy");
  sweep->add_option("--data", sweep_data, "task directory")->required();
  sweep->add_option("--param", sweep_param, "K or h")->required()->check(CLI::IsMember({"K", "h"}));
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_out, "also write the table here");
  add_training_inputs(sweep, sweep_inputs);

  // ablate
  std::string ablate_data;
  std::string ablate_out;
  TrainingInputs ablate_inputs;
  auto* ablate = app.add_subcommand("ablate", "compare the full model with its ablations");
  ablate->add_option("--data", ablate_data, "task directory")->required();
  ablate->add_option("--out", ablate_out, "also write the table here");
  add_training_inputs(ablate, ablate_inputs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*synth) {
      const SyntheticTask task = generate_synthetic(spec);
      const auto [transductive, oracle] = make_transductive(task, holdout, spec.seed);
      save_task(synth_out, transductive, oracle);
      out << "wrote " << task.data.size() << " instances (" << transductive.labeled.size()
          << " labeled, " << transductive.unlabeled.size() << " unlabeled) to " << synth_out
          << "\n";
    } else if (*project) {
      require_dir(project_data, "data");
      const TrainConfig config = resolve_config(project_inputs);
      const TransductiveTask task = to_task(load_task(project_data));
      const ProjectionSet set = build_projection_set(
          task.attributes, task.split, resolve_projection(config, task.attributes.dim()));
      save_projection_set(set, project_out);
      out << "wrote " << set.size() << " projections of shape " << set.h << "x" << set.m
          << " to " << project_out << "\n";
    } else if (*train) {
      require_dir(train_data, "data");
      const TrainConfig config = resolve_config(train_inputs);
      const LoadedData loaded = load_task(train_data);
      const TransductiveTask task = to_task(loaded);
      const TrainResult result = train_on(config, task, loaded.oracle);
      const fs::path dir(train_out);
      fs::create_directories(dir);
      save_checkpoint(dir / "model.ckpt", result.model, result.optimizer);
      save_projection_set(result.model.projections(), dir / "projections.bin");
      write_file_atomic(dir / "history.tsv", result.history.to_text());
      write_file_atomic(dir / "config.cfg", format_config(config));
      write_file_atomic(dir / "manifest.txt",
                        "data=" + fs::absolute(train_data).lexically_normal().string() +
                            "\nmode=" + (config.gzsl_mode ? "gzsl" : "zsl") + "\n");
      out << "trained " << result.model.num_heads() << " classifiers for "
          << result.history.records.size() << " iterations (kernels: "
          << simd::isa_name(simd::active_kernels().isa) << "); run written to " << train_out
          << "\n";
    } else if (*eval) {
      require_dir(eval_run, "run");
      const fs::path dir(eval_run);
      if (!fs::exists(dir / "manifest.txt")) throw UsageError("not a run directory: " + eval_run);
      const auto manifest = read_manifest(dir / "manifest.txt");
      const std::string data_dir = eval_data.empty() ? manifest.at("data") : eval_data;
      require_dir(data_dir, "data");
      const EvalMode mode = parse_mode(eval_mode.empty() ? manifest.at("mode") : eval_mode);
      const TrainConfig config = load_config(dir / "config.cfg");
      const LoadedData loaded = load_task(data_dir);
      require(loaded.oracle.size() > 0, ErrorKind::kValidation,
              "task has no labels.txt; nothing to evaluate against");
      const TransductiveTask task = to_task(loaded);
      const Checkpoint ckpt = load_checkpoint(dir / "model.ckpt",
                                              load_projection_set(dir / "projections.bin"),
                                              task.attributes);
      const EvalReport report = evaluate_on_task(ckpt.model, task, loaded.oracle, mode,
                                                 GzslOptions{config.seen_calibration});
      for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
      write_file_atomic(dir / "metrics.txt", format_metrics(report));
      write_file_atomic(dir / "report.txt", format_report(report));
      out << format_report(report);
    } else if (*sweep) {
      require_dir(sweep_data, "data");
      const TrainConfig base = resolve_config(sweep_inputs);
      const LoadedData loaded = load_task(sweep_data);
      require(loaded.oracle.size() > 0, ErrorKind::kValidation, "sweep needs labels.txt");
      const TransductiveTask task = to_task(loaded);
      const EvalMode mode = base.gzsl_mode ? EvalMode::kGzsl : EvalMode::kZsl;
      std::string table = result_header(sweep_param, mode);
      for (std::size_t value : sweep_values) {
        TrainConfig config = base;
        (sweep_param == "K" ? config.K : config.h) = value;
        const TrainResult result = train_on(config, task, loaded.oracle);
        table += result_row(std::to_string(value),
                            evaluate_on_task(result.model, task, loaded.oracle, mode,
                                             GzslOptions{config.seen_calibration}));
      }
      if (!sweep_out.empty()) write_file_atomic(sweep_out, table);
      out << table;
    } else if (*ablate) {
      require_dir(ablate_data, "data");
      const TrainConfig base = resolve_config(ablate_inputs);
      const LoadedData loaded = load_task(ablate_data);
      require(loaded.oracle.size() > 0, ErrorKind::kValidation, "ablate needs labels.txt");
      const TransductiveTask task = to_task(loaded);
      const EvalMode mode = base.gzsl_mode ? EvalMode::kGzsl : EvalMode::kZsl;
      std::string table = result_header("variant", mode);
      const std::pair<const char*, TrainConfig> variants[] = {
          {"full", [&] { auto c = base; c.single_classifier = c.no_projection = false; return c; }()},
          {"single_classifier", [&] { auto c = base; c.single_classifier = true; return c; }()},
          {"no_projection", [&] { auto c = base; c.no_projection = true; c.single_classifier = false; return c; }()},
      };
      for (const auto& [name, config] : variants) {
        const TrainResult result = train_on(config, task, loaded.oracle);
        table += result_row(name, evaluate_on_task(result.model, task, loaded.oracle, mode,
                                                   GzslOptions{config.seen_calibration}));
      }
      if (!ablate_out.empty()) write_file_atomic(ablate_out, table);
      out << table;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kIo ? kExitRuntime : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace pren
