// Copyright 2026 The detmix Authors.
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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "detmix/augment.hpp"
#include "detmix/dataset.hpp"

namespace detmix {

inline constexpr int kConfigSchemaVersion = 1;

// Conditions compare in table order: the baseline, the four traditional
// augmentations, then synthetic shares ascending.
enum class ConditionKind { kNone, kCopyPaste, kHsv, kMixup, kFlipRot, kSynthetic };

struct Condition {
  ConditionKind kind = ConditionKind::kNone;
  int share_percent = 0;  // only for kSynthetic

  static Condition none() { return {}; }
  static Condition synthetic(int share_percent);

  bool is_traditional() const {
    return kind != ConditionKind::kNone && kind != ConditionKind::kSynthetic;
  }

  friend auto operator<=>(const Condition&, const Condition&) = default;
};

// "none", "copy_paste", "hsv", "mixup", "flip_rot", "synthetic:<s>".
std::string to_string(const Condition& c);
Condition parse_condition(std::string_view text);
// Row label used in rendered tables, e.g. "Orig. + Synth. (10%)".
std::string display_name(const Condition& c);
// Short form used inside run ids, e.g. "synth010".
std::string slug(const Condition& c);

enum class InitMode { kPretrained, kScratch };

const char* to_string(InitMode init);
InitMode parse_init(std::string_view text);

enum class LrSchedule { kCosine, kLinear, kConstant };

const char* to_string(LrSchedule s);
LrSchedule parse_lr_schedule(std::string_view text);

struct TrainerParams {
  int epochs = 300;
  int patience = 30;
  int batch_size = 16;
  double initial_lr = 0.01;
  LrSchedule lr_schedule = LrSchedule::kCosine;

  void validate() const;
  friend bool operator==(const TrainerParams&, const TrainerParams&) = default;
};

struct ExperimentPaths {
  std::filesystem::path dataset;         // labeled real images
  std::filesystem::path synthetic_pool;  // labeled synthetic images
  std::filesystem::path work_dir = "work";
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  std::vector<std::string> classes = kDefaultClasses;
  std::vector<std::string> models;
  std::vector<InitMode> inits;
  std::vector<Condition> conditions;
  TrainerParams trainer;
  ExperimentPaths paths;
  SplitSpec split;  // split.seed mirrors `seed`
  AugmentationPolicy augmentation;
  double reporting_confidence = 0.25;
  std::string hardware;

  // Throws detmix::Error on an empty model, init or condition list, a
  // duplicate entry, or any out-of-range parameter.
  void validate() const;
};

// YAML text. Relative paths are resolved against `base_dir`. Unknown keys
// are rejected so that typos do not silently fall back to defaults.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace detmix
