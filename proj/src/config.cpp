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

#include "detmix/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <set>

#include "detmix/error.hpp"
#include "detmix/image_io.hpp"
#include "detmix/text.hpp"

namespace fs = std::filesystem;

namespace detmix {
namespace {

struct KindName {
  ConditionKind kind;
  const char* name;
  const char* display;
  const char* slug;
};

constexpr KindName kKinds[] = {
    {ConditionKind::kNone, "none", "No Augmentation", "none"},
    {ConditionKind::kCopyPaste, "copy_paste", "Copy-paste", "copypaste"},
    {ConditionKind::kHsv, "hsv", "HSV", "hsv"},
    {ConditionKind::kMixup, "mixup", "Mix", "mixup"},
    {ConditionKind::kFlipRot, "flip_rot", "Flip and rot.", "fliprot"},
};

constexpr std::string_view kSyntheticPrefix = "synthetic:";

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ParseError("config: '" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError("config: '" + where + "' has an invalid value");
  }
}

template <typename T>
void read_if(const YAML::Node& parent, const char* key, const std::string& where, T& out) {
  if (const YAML::Node n = parent[key]) out = scalar<T>(n, where + "." + key);
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ParseError("config: '" + where + "' must be a list");
  std::vector<std::string> out;
  for (const auto& item : node) out.push_back(scalar<std::string>(item, where));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

GeomTransform rotation_from_degrees(double deg) {
  if (deg == 90) return GeomTransform::rotate_90cw();
  if (deg == 180) return GeomTransform::rotate_180();
  if (deg == 270) return GeomTransform::rotate_270cw();
  return GeomTransform::rotate(deg);
}

template <typename T>
void require_unique(const std::vector<T>& items, const char* what) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (items[i] == items[j]) throw Error(std::string("config: duplicate entry in ") + what);
    }
  }
}

}  // namespace

Condition Condition::synthetic(int share_percent) {
  if (share_percent <= 0) throw Error("synthetic share must be positive");
  return {ConditionKind::kSynthetic, share_percent};
}

std::string to_string(const Condition& c) {
  if (c.kind == ConditionKind::kSynthetic) {
    return std::string(kSyntheticPrefix) + std::to_string(c.share_percent);
  }
  for (const auto& k : kKinds) {
    if (k.kind == c.kind) return k.name;
  }
  return "?";
}

Condition parse_condition(std::string_view text) {
  text = trim(text);
  for (const auto& k : kKinds) {
    if (text == k.name) return {k.kind, 0};
  }
  if (text.starts_with(kSyntheticPrefix)) {
    long long share = 0;
    try {
      share = parse_int(text.substr(kSyntheticPrefix.size()));
    } catch (const Error&) {
      throw ParseError("bad synthetic share in condition '" + std::string(text) + "'");
    }
    if (share <= 0 || share > 100000) {
      throw ParseError("synthetic share must be positive in '" + std::string(text) + "'");
    }
    return Condition::synthetic(static_cast<int>(share));
  }
  throw ParseError("unknown condition '" + std::string(text) + "'");
}

std::string display_name(const Condition& c) {
  if (c.kind == ConditionKind::kSynthetic) {
    return "Orig. + Synth. (" + std::to_string(c.share_percent) + "%)";
  }
  for (const auto& k : kKinds) {
    if (k.kind == c.kind) return k.display;
  }
  return "?";
}

std::string slug(const Condition& c) {
  if (c.kind == ConditionKind::kSynthetic) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth%03d", c.share_percent);
    return buf;
  }
  for (const auto& k : kKinds) {
    if (k.kind == c.kind) return k.slug;
  }
  return "?";
}

const char* to_string(InitMode init) {
  return init == InitMode::kPretrained ? "pretrained" : "scratch";
}

InitMode parse_init(std::string_view text) {
  if (text == "pretrained") return InitMode::kPretrained;
  if (text == "scratch") return InitMode::kScratch;
  throw ParseError("unknown init mode '" + std::string(text) + "' (pretrained or scratch)");
}

const char* to_string(LrSchedule s) {
  switch (s) {
    case LrSchedule::kCosine: return "cosine";
    case LrSchedule::kLinear: return "linear";
    case LrSchedule::kConstant: return "constant";
  }
  return "?";
}

LrSchedule parse_lr_schedule(std::string_view text) {
  if (text == "cosine") return LrSchedule::kCosine;
  if (text == "linear") return LrSchedule::kLinear;
  if (text == "constant") return LrSchedule::kConstant;
  throw ParseError("unknown lr schedule '" + std::string(text) + "'");
}

void TrainerParams::validate() const {
  if (epochs <= 0 || patience <= 0 || batch_size <= 0 || !(initial_lr > 0)) {
    throw Error("trainer parameters must be positive");
  }
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw Error("config: unsupported schema_version " + std::to_string(schema_version));
  }
  if (models.empty()) throw Error("config: no models");
  if (inits.empty()) throw Error("config: no init modes");
  if (conditions.empty()) throw Error("config: no conditions");
  if (classes.empty()) throw Error("config: empty class table");
  for (const std::string& m : models) {
    if (m.empty() || m.find_first_of("/\\ \t") != std::string::npos) {
      throw Error("config: invalid model tag '" + m + "'");
    }
  }
  require_unique(models, "models");
  require_unique(inits, "inits");
  require_unique(conditions, "conditions");
  for (const Condition& c : conditions) {
    if (c.kind == ConditionKind::kSynthetic && c.share_percent <= 0) {
      throw Error("config: synthetic shares must be positive");
    }
  }
  trainer.validate();
  augmentation.validate();
  split_sizes(3, split);
  if (!(reporting_confidence >= 0 && reporting_confidence <= 1)) {
    throw Error("config: reporting_confidence must be in [0, 1]");
  }
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  check_keys(root, "top level",
             {"schema_version", "seed", "classes", "models", "inits", "conditions", "trainer",
              "paths", "split", "augmentation", "evaluation", "hardware"});
  if (!root["schema_version"]) throw ParseError("config: missing schema_version");

  ExperimentConfig cfg;
  read_if(root, "schema_version", "", cfg.schema_version);
  read_if(root, "seed", "", cfg.seed);
  read_if(root, "hardware", "", cfg.hardware);
  if (root["classes"]) cfg.classes = string_list(root["classes"], "classes");
  if (root["models"]) cfg.models = string_list(root["models"], "models");
  if (root["inits"]) {
    for (const auto& s : string_list(root["inits"], "inits")) cfg.inits.push_back(parse_init(s));
  }
  if (root["conditions"]) {
    for (const auto& s : string_list(root["conditions"], "conditions")) {
      cfg.conditions.push_back(parse_condition(s));
    }
  }

  if (const YAML::Node t = root["trainer"]) {
    check_keys(t, "trainer", {"epochs", "patience", "batch_size", "initial_lr", "lr_schedule"});
    read_if(t, "epochs", "trainer", cfg.trainer.epochs);
    read_if(t, "patience", "trainer", cfg.trainer.patience);
    read_if(t, "batch_size", "trainer", cfg.trainer.batch_size);
    read_if(t, "initial_lr", "trainer", cfg.trainer.initial_lr);
    if (t["lr_schedule"]) {
      cfg.trainer.lr_schedule = parse_lr_schedule(scalar<std::string>(t["lr_schedule"], "lr_schedule"));
    }
  }

  if (const YAML::Node p = root["paths"]) {
    check_keys(p, "paths", {"dataset", "synthetic_pool", "work_dir"});
    std::string s;
    if (p["dataset"]) cfg.paths.dataset = resolve(base_dir, scalar<std::string>(p["dataset"], "paths.dataset"));
    if (p["synthetic_pool"]) {
      cfg.paths.synthetic_pool = resolve(base_dir, scalar<std::string>(p["synthetic_pool"], "paths.synthetic_pool"));
    }
    if (p["work_dir"]) s = scalar<std::string>(p["work_dir"], "paths.work_dir");
    cfg.paths.work_dir = resolve(base_dir, s.empty() ? cfg.paths.work_dir.string() : s);
  } else {
    cfg.paths.work_dir = resolve(base_dir, cfg.paths.work_dir.string());
  }

  if (const YAML::Node s = root["split"]) {
    check_keys(s, "split", {"train", "val", "test"});
    read_if(s, "train", "split", cfg.split.train_fraction);
    read_if(s, "val", "split", cfg.split.val_fraction);
    read_if(s, "test", "split", cfg.split.test_fraction);
  }
  cfg.split.seed = cfg.seed;

  if (const YAML::Node a = root["augmentation"]) {
    check_keys(a, "augmentation",
               {"p_copy_paste", "p_mixup", "p_hsv", "p_flip_rot", "hsv_gains", "mixup_alpha",
                "rotations", "copy_paste_max_instances", "min_visible_area_fraction"});
    AugmentationPolicy& pol = cfg.augmentation;
    read_if(a, "p_copy_paste", "augmentation", pol.p_copy_paste);
    read_if(a, "p_mixup", "augmentation", pol.p_mixup);
    read_if(a, "p_hsv", "augmentation", pol.p_hsv);
    read_if(a, "p_flip_rot", "augmentation", pol.p_flip_rot);
    read_if(a, "mixup_alpha", "augmentation", pol.mixup_alpha);
    read_if(a, "copy_paste_max_instances", "augmentation", pol.copy_paste_max_instances);
    read_if(a, "min_visible_area_fraction", "augmentation", pol.min_visible_area_fraction);
    if (const YAML::Node g = a["hsv_gains"]) {
      if (!g.IsSequence() || g.size() != 3) {
        throw ParseError("config: augmentation.hsv_gains must be a list of 3 numbers");
      }
      pol.hsv_gains = {scalar<double>(g[0], "hsv_gains"), scalar<double>(g[1], "hsv_gains"),
                       scalar<double>(g[2], "hsv_gains")};
    }
    if (const YAML::Node r = a["rotations"]) {
      if (!r.IsSequence()) throw ParseError("config: augmentation.rotations must be a list");
      pol.rotation_set.clear();
      for (const auto& deg : r) {
        pol.rotation_set.push_back(rotation_from_degrees(scalar<double>(deg, "rotations")));
      }
    }
  }

  if (const YAML::Node e = root["evaluation"]) {
    check_keys(e, "evaluation", {"reporting_confidence"});
    read_if(e, "reporting_confidence", "evaluation", cfg.reporting_confidence);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_config(text, path.parent_path());
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace detmix
