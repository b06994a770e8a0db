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

#include "detmix/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "detmix/error.hpp"
#include "detmix/fingerprint.hpp"
#include "detmix/image_io.hpp"
#include "detmix/parallel.hpp"
#include "detmix/report.hpp"
#include "detmix/text.hpp"

namespace fs = std::filesystem;

namespace detmix {
namespace {

constexpr std::string_view kReportPrefix = "report.";

void remove_tree(const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot remove: " + ec.message());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
}

std::string rotation_degrees(const GeomTransform& t) {
  switch (t.kind) {
    case TransformKind::kRotate90Cw: return "90";
    case TransformKind::kRotate180: return "180";
    case TransformKind::kRotate270Cw: return "270";
    default: return format_double(t.angle_deg);
  }
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<RunRecord> select_runs(std::vector<RunRecord> records, const CommandOptions& opts) {
  if (opts.only_runs.empty()) return records;
  std::set<std::string> known;
  for (const RunRecord& r : records) known.insert(r.run_id);
  for (const std::string& id : opts.only_runs) {
    if (!known.count(id)) throw Error("unknown run id '" + id + "'");
  }
  std::erase_if(records, [&](const RunRecord& r) {
    return std::find(opts.only_runs.begin(), opts.only_runs.end(), r.run_id) ==
           opts.only_runs.end();
  });
  return records;
}

bool same_identity(const RunRecord& a, const RunRecord& b) {
  return a.run_id == b.run_id && a.model == b.model && a.init == b.init &&
         a.condition == b.condition;
}

Dataset load_split(const ExperimentConfig& config, std::string_view name, int jobs) {
  const Workspace ws(config.paths.work_dir);
  const fs::path dir = ws.split_dir(name);
  if (!fs::is_directory(dir)) {
    throw Error(dir.string() + " is missing; run 'prepare' first");
  }
  Dataset ds = load_dataset(dir, config.classes, Origin::kReal, jobs);
  ds.name = std::string(name);
  return ds;
}

std::string provenance_of(const RunRecord& run) {
  return "run=" + run.run_id + ";predictions=" + run.prediction_source;
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kPlanned: return "planned";
    case RunStatus::kPrepared: return "prepared";
    case RunStatus::kEvaluated: return "evaluated";
  }
  return "?";
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "planned") return RunStatus::kPlanned;
  if (text == "prepared") return RunStatus::kPrepared;
  if (text == "evaluated") return RunStatus::kEvaluated;
  throw ParseError("unknown run status '" + std::string(text) + "'");
}

void RunRecord::validate() const {
  if (report.has_value() != (status == RunStatus::kEvaluated)) {
    throw Error("run " + run_id + ": a report must be present exactly when the run is evaluated");
  }
}

std::string make_run_id(std::size_t index, const std::string& model, InitMode init,
                        const Condition& condition) {
  char prefix[32];
  std::snprintf(prefix, sizeof prefix, "%03zu", index);
  return std::string(prefix) + "-" + model + "-" + to_string(init) + "-" + slug(condition);
}

std::string format_record(const RunRecord& r) {
  r.validate();
  std::ostringstream out;
  out << "run_id=" << r.run_id << '\n'
      << "index=" << r.index << '\n'
      << "model=" << r.model << '\n'
      << "init=" << to_string(r.init) << '\n'
      << "condition=" << to_string(r.condition) << '\n'
      << "status=" << to_string(r.status) << '\n'
      << "seed=" << r.seed << '\n'
      << "dataset_path=" << r.dataset_path << '\n'
      << "dataset_fingerprint=" << r.dataset_fingerprint << '\n'
      << "prediction_source=" << r.prediction_source << '\n'
      << "hardware=" << r.hardware << '\n';
  if (r.report) {
    for (const std::string& line : read_lines(to_key_value(*r.report))) {
      out << kReportPrefix << line << '\n';
    }
  }
  return out.str();
}

RunRecord parse_record(const std::string& text, const std::string& source) {
  RunRecord r;
  std::string report_text;
  bool has_report = false;
  const auto lines = read_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source + ":" + std::to_string(i + 1) + ": missing '='");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key.starts_with(kReportPrefix)) {
        has_report = true;
        report_text += line.substr(kReportPrefix.size()) + "\n";
      } else if (key == "run_id") {
        r.run_id = value;
      } else if (key == "index") {
        r.index = static_cast<std::size_t>(parse_u64(value));
      } else if (key == "model") {
        r.model = value;
      } else if (key == "init") {
        r.init = parse_init(value);
      } else if (key == "condition") {
        r.condition = parse_condition(value);
      } else if (key == "status") {
        r.status = parse_run_status(value);
      } else if (key == "seed") {
        r.seed = parse_u64(value);
      } else if (key == "dataset_path") {
        r.dataset_path = value;
      } else if (key == "dataset_fingerprint") {
        r.dataset_fingerprint = value;
      } else if (key == "prediction_source") {
        r.prediction_source = value;
      } else if (key == "hardware") {
        r.hardware = value;
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      throw ParseError(source + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (has_report) r.report = eval_report_from_key_value(report_text);
  try {
    r.validate();
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }
  return r;
}

fs::path Workspace::split_dir(std::string_view name) const { return root_ / "splits" / name; }
fs::path Workspace::run_dir(const std::string& run_id) const { return root_ / "runs" / run_id; }
fs::path Workspace::record_path(const std::string& run_id) const {
  return run_dir(run_id) / "record.txt";
}
fs::path Workspace::trainer_config_path(const std::string& run_id) const {
  return run_dir(run_id) / "trainer.cfg";
}
fs::path Workspace::predictions_dir(const std::string& run_id) const {
  return run_dir(run_id) / "predictions";
}
fs::path Workspace::reports_dir() const { return root_ / "reports"; }

std::optional<RunRecord> Workspace::load_record(const std::string& run_id) const {
  const fs::path path = record_path(run_id);
  if (!fs::exists(path)) return std::nullopt;
  return parse_record(read_text(path), path.string());
}

void Workspace::save_record(const RunRecord& record) const {
  make_dirs(run_dir(record.run_id));
  write_text_atomic(record_path(record.run_id), format_record(record));
}

std::vector<RunRecord> plan_experiments(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunRecord> runs;
  runs.reserve(config.models.size() * config.inits.size() * config.conditions.size());
  for (const std::string& model : config.models) {
    for (InitMode init : config.inits) {
      for (const Condition& cond : config.conditions) {
        RunRecord r;
        r.index = runs.size();
        r.run_id = make_run_id(r.index, model, init, cond);
        r.model = model;
        r.init = init;
        r.condition = cond;
        r.seed = config.seed;
        r.dataset_path = run_dataset_path(r);
        r.prediction_source = "runs/" + r.run_id + "/predictions";
        r.hardware = config.hardware;
        runs.push_back(std::move(r));
      }
    }
  }
  return runs;
}

std::string run_dataset_path(const RunRecord& run) {
  if (run.condition.kind == ConditionKind::kSynthetic) return "runs/" + run.run_id + "/dataset";
  return "splits/train";
}

Dataset build_run_dataset(const RunRecord& run, const Dataset& train, const Dataset* pool) {
  if (run.condition.kind != ConditionKind::kSynthetic) return train;
  if (!pool) throw Error("run " + run.run_id + " needs a synthetic pool");
  return mix_synthetic(train, *pool, {run.condition.share_percent, run.seed});
}

RunRecord prepare_run_dataset(const RunRecord& run, const Workspace& workspace,
                              const Dataset& train, const Dataset* pool) {
  const Dataset ds = build_run_dataset(run, train, pool);
  RunRecord out = run;
  out.dataset_path = run_dataset_path(run);
  if (run.condition.kind == ConditionKind::kSynthetic) {
    const fs::path dir = workspace.root() / out.dataset_path;
    remove_tree(dir);
    write_dataset(ds, dir);
  }
  const std::string fp = dataset_fingerprint(ds);
  if (!(run.status == RunStatus::kEvaluated && run.dataset_fingerprint == fp)) {
    out.status = RunStatus::kPrepared;
    out.report.reset();
  }
  out.dataset_fingerprint = fp;
  return out;
}

std::string trainer_config_text(const RunRecord& run, const ExperimentConfig& config) {
  const AugmentationPolicy& pol = config.augmentation;
  auto prob = [&](ConditionKind kind, double p) {
    return format_double(run.condition.kind == kind ? p : 0.0);
  };
  std::vector<std::string> rotations;
  for (const GeomTransform& t : pol.rotation_set) rotations.push_back(rotation_degrees(t));

  // std::map keeps the keys sorted.
  std::map<std::string, std::string> kv = {
      {"augment.builtin", "disabled"},
      {"augment.mode", "online"},
      {"augment.copy_paste", prob(ConditionKind::kCopyPaste, pol.p_copy_paste)},
      {"augment.copy_paste_max_instances", std::to_string(pol.copy_paste_max_instances)},
      {"augment.flip_rot", prob(ConditionKind::kFlipRot, pol.p_flip_rot)},
      {"augment.hsv", prob(ConditionKind::kHsv, pol.p_hsv)},
      {"augment.hsv_gains", format_double(pol.hsv_gains.h_gain) + "," +
                                format_double(pol.hsv_gains.s_gain) + "," +
                                format_double(pol.hsv_gains.v_gain)},
      {"augment.min_visible_area_fraction", format_double(pol.min_visible_area_fraction)},
      {"augment.mixup", prob(ConditionKind::kMixup, pol.p_mixup)},
      {"augment.mixup_alpha", format_double(pol.mixup_alpha)},
      {"augment.rotations", join(rotations, ',')},
      {"batch", std::to_string(config.trainer.batch_size)},
      {"classes", join(config.classes, ',')},
      {"condition", to_string(run.condition)},
      {"data.test", "splits/test"},
      {"data.train", run_dataset_path(run)},
      {"data.val", "splits/val"},
      {"epochs", std::to_string(config.trainer.epochs)},
      {"init", to_string(run.init)},
      {"lr0", format_double(config.trainer.initial_lr)},
      {"model", run.model},
      {"patience", std::to_string(config.trainer.patience)},
      {"predictions", run.prediction_source},
      {"run_id", run.run_id},
      {"schedule", to_string(config.trainer.lr_schedule)},
      {"seed", std::to_string(run.seed)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

fs::path emit_trainer_config(const RunRecord& run, const ExperimentConfig& config,
                             const Workspace& workspace) {
  make_dirs(workspace.run_dir(run.run_id));
  const fs::path path = workspace.trainer_config_path(run.run_id);
  write_text_atomic(path, trainer_config_text(run, config));
  return path;
}

std::vector<Detection> ingest_predictions(const fs::path& dir, const Dataset& test) {
  std::set<std::string> ids;
  for (const Sample& s : test.samples) ids.insert(s.image_id);
  std::vector<Detection> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    if (!ids.count(entry.path().stem().string())) {
      throw Error(entry.path().string() + ": no test image with id '" +
                  entry.path().stem().string() + "'");
    }
  }
  for (const Sample& s : test.samples) {
    const fs::path file = dir / (s.image_id + ".txt");
    if (!fs::exists(file)) continue;
    auto dets = read_prediction_file(file, s.image_id);
    for (const Detection& d : dets) {
      if (static_cast<std::size_t>(d.class_id) >= test.classes.size()) {
        throw Error(file.string() + ": class id " + std::to_string(d.class_id) +
                    " outside the class table");
      }
    }
    out.insert(out.end(), std::make_move_iterator(dets.begin()),
               std::make_move_iterator(dets.end()));
  }
  return out;
}

void write_prediction_files(const fs::path& dir, const Dataset& images,
                            std::span<const Detection> detections) {
  make_dirs(dir);
  std::map<std::string, std::string> text;
  for (const Sample& s : images.samples) text[s.image_id];
  for (const Detection& d : detections) {
    auto it = text.find(d.image_id);
    if (it == text.end()) throw Error("detection for unknown image '" + d.image_id + "'");
    it->second += format_prediction_line(d);
  }
  for (const auto& [id, body] : text) write_text_atomic(dir / (id + ".txt"), body);
}

RunRecord evaluate_run(const RunRecord& run, std::span<const Detection> detections,
                       std::span<const GroundTruth> ground_truth, const EvalConfig& config) {
  RunRecord out = run;
  out.report = evaluate(detections, ground_truth, config);
  out.status = RunStatus::kEvaluated;
  return out;
}

std::vector<RunRecord> load_records(const ExperimentConfig& config) {
  const Workspace ws(config.paths.work_dir);
  std::vector<RunRecord> out;
  for (const RunRecord& planned : plan_experiments(config)) {
    auto stored = ws.load_record(planned.run_id);
    if (stored && !same_identity(*stored, planned)) {
      throw Error(ws.record_path(planned.run_id).string() +
                  " does not match the configured run; use a fresh work directory");
    }
    out.push_back(stored ? *stored : planned);
  }
  return out;
}

std::vector<RunRecord> command_plan(const ExperimentConfig& config, const CommandOptions& opts) {
  const Workspace ws(config.paths.work_dir);
  auto records = select_runs(load_records(config), opts);
  for (const RunRecord& r : records) {
    if (!fs::exists(ws.record_path(r.run_id))) ws.save_record(r);
  }
  return records;
}

std::vector<RunRecord> command_prepare(const ExperimentConfig& config, const CommandOptions& opts) {
  const Workspace ws(config.paths.work_dir);
  auto records = select_runs(load_records(config), opts);

  Dataset labeled = load_dataset(config.paths.dataset, config.classes, Origin::kReal, opts.jobs);
  labeled.name = "dataset";
  DatasetSplit parts = split(labeled, config.split);
  parts.train.name = "train";
  parts.val.name = "val";
  parts.test.name = "test";
  for (const Dataset* d : {&parts.train, &parts.val, &parts.test}) {
    remove_tree(ws.split_dir(d->name));
    write_dataset(*d, ws.split_dir(d->name), opts.jobs);
  }

  std::optional<Dataset> pool;
  const bool needs_pool = std::any_of(records.begin(), records.end(), [](const RunRecord& r) {
    return r.condition.kind == ConditionKind::kSynthetic;
  });
  if (needs_pool) {
    if (config.paths.synthetic_pool.empty()) {
      throw Error("synthetic-share runs need paths.synthetic_pool in the config");
    }
    pool = load_dataset(config.paths.synthetic_pool, config.classes, Origin::kSynthetic, opts.jobs);
    pool->name = "synthetic";
  }

  parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
    records[i] = prepare_run_dataset(records[i], ws, parts.train, pool ? &*pool : nullptr);
    ws.save_record(records[i]);
  });
  return records;
}

std::vector<fs::path> command_emit_config(const ExperimentConfig& config,
                                          const CommandOptions& opts) {
  const Workspace ws(config.paths.work_dir);
  const auto records = select_runs(load_records(config), opts);
  std::vector<fs::path> paths(records.size());
  parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
    paths[i] = emit_trainer_config(records[i], config, ws);
  });
  return paths;
}

std::vector<RunRecord> command_evaluate(const ExperimentConfig& config, const CommandOptions& opts) {
  const Workspace ws(config.paths.work_dir);
  auto records = select_runs(load_records(config), opts);
  const Dataset test = load_split(config, "test", opts.jobs);
  const std::vector<GroundTruth> gts = ground_truth_of(test);

  std::vector<char> done(records.size(), 0);
  parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
    RunRecord& r = records[i];
    const fs::path dir = ws.root() / r.prediction_source;
    if (!fs::is_directory(dir)) return;
    const auto dets = ingest_predictions(dir, test);
    EvalConfig ec;
    ec.reporting_confidence = config.reporting_confidence;
    ec.provenance = provenance_of(r);
    r = evaluate_run(r, dets, gts, ec);
    ws.save_record(r);
    done[i] = 1;
  });
  std::vector<RunRecord> evaluated;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (done[i]) evaluated.push_back(records[i]);
  }
  return evaluated;
}

std::vector<fs::path> command_report(const ExperimentConfig& config) {
  const Workspace ws(config.paths.work_dir);
  const RenderedReport report = render_report(load_records(config));
  return write_report(report, ws.reports_dir());
}

std::string command_stats(const ExperimentConfig& config) {
  const Workspace ws(config.paths.work_dir);
  const auto stats = run_stats(load_records(config));
  make_dirs(ws.reports_dir());
  write_text_atomic(ws.reports_dir() / "stats.csv", format_run_stats_csv(stats));
  const std::string text = format_run_stats_text(stats);
  write_text_atomic(ws.reports_dir() / "stats.txt", text);
  return text;
}

Dataset command_augment_offline(const ExperimentConfig& config, const fs::path& input,
                                const fs::path& output, int variants, int jobs) {
  Dataset source = load_dataset(input, config.classes, Origin::kReal, jobs);
  Dataset out = materialize_offline(source, config.augmentation, variants, config.seed, jobs);
  write_dataset(out, output, jobs);
  return out;
}

}  // namespace detmix
