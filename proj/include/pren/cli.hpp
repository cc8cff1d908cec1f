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

#pragma once

#include <ostream>
#include <vector>

#include "pren/dataset.hpp"
#include "pren/ensemble_model.hpp"
#include "pren/predictor.hpp"

namespace pren {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitRuntime = 3,
};

// Subcommands: synth, project, train, eval, sweep, ablate. See `pren --help`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Scores a trained model on the unlabeled instances of a task against the
// hidden labels. zsl mode uses only instances whose true class is unseen.
EvalReport evaluate_on_task(const EnsembleModel& model, const TransductiveTask& task,
                            const LabelOracle& oracle, EvalMode mode,
                            const GzslOptions& options = {});

}  // namespace pren
