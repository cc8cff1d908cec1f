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

// Flat key=value training configuration. Keys are the TrainConfig field
// names; '#' starts a comment; unknown keys are validation errors.
//
//   extractor_widths = auto | identity | w1,w2,...
//   head_hidden      = none | w1,w2,...
//   t_unseen_only    = auto | <n>
//   booleans         = true | false | 1 | 0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pren/progressive_trainer.hpp"

namespace pren {

// Applies `text` on top of `base`.
TrainConfig parse_config(std::string_view text, TrainConfig base = {},
                         std::string_view source = "config");
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
std::string format_config(const TrainConfig& config);

// Sets one key; throws kValidation for an unknown key or bad value.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

// Settings sized for the synthetic desk task: small heads, no extractor
// layer, three pretraining rounds.
TrainConfig desk_config();

}  // namespace pren
