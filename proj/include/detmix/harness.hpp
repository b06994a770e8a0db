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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detmix/config.hpp"
#include "detmix/dataset.hpp"
#include "detmix/metrics.hpp"

namespace detmix {

enum class RunStatus { kPlanned, kPrepared, kEvaluated };

const char* to_string(RunStatus s);
RunStatus parse_run_status(std::string_view text);

// One cell of the experiment matrix and everything known about it so far.
struct RunRecord {
  std::string run_id;
  std::size_t index = 0;
  std::string model;
  InitMode init = InitMode::kPretrained;
  Condition condition;
  RunStatus status = RunStatus::kPlanned;
  std::uint64_t seed = 0;
  std::string dataset_path;  // relative to the work directory
  std::string dataset_fingerprint;
  std::string prediction_source;
  std::optional<EvalReport> report;
  std::string hardware;

  // Throws detmix::Error unless the report is present exactly when the
  // status is kEvaluated.
  void validate() const;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// "<index>-<model>-<init>-<condition slug>", index zero-padded to 3 digits.
std::string make_run_id(std::size_t index, const std::string& model, InitMode init,
                        const Condition& condition);

std::string format_record(const RunRecord& record);
RunRecord parse_record(const std::string& text, const std::string& source);

// Directory layout below the configured work directory.
//
//   splits/{train,val,test}/     base split of the labeled dataset
//   runs/<run_id>/record.txt     RunRecord
//   runs/<run_id>/trainer.cfg    emitted trainer configuration
//   runs/<run_id>/dataset/       training set for synthetic-share runs
//   runs/<run_id>/predictions/   prediction dump from the external trainer
//   reports/                     rendered tables and statistics
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path split_dir(std::string_view name) const;
  std::filesystem::path run_dir(const std::string& run_id) const;
  std::filesystem::path record_path(const std::string& run_id) const;
  std::filesystem::path trainer_config_path(const std::string& run_id) const;
  std::filesystem::path predictions_dir(const std::string& run_id) const;
  std::filesystem::path reports_dir() const;

  // Missing record files yield std::nullopt.
  std::optional<RunRecord> load_record(const std::string& run_id) const;
  void save_record(const RunRecord& record) const;

 private:
  std::filesystem::path root_;
};

// models x inits x conditions in config order, conditions varying fastest.
std::vector<RunRecord> plan_experiments(const ExperimentConfig& config);

// Work-directory-relative path of the training set a run trains on.
std::string run_dataset_path(const RunRecord& run);

// The training set for `run`: `train` itself, or train mixed with the
// synthetic pool for synthetic-share runs. `pool` may be null otherwise.
Dataset build_run_dataset(const RunRecord& run, const Dataset& train, const Dataset* pool);

// Builds the run's training set, writes it when it differs from the base
// split, and returns the record with its fingerprint and status updated.
RunRecord prepare_run_dataset(const RunRecord& run, const Workspace& workspace,
                              const Dataset& train, const Dataset* pool);

std::string trainer_config_text(const RunRecord& run, const ExperimentConfig& config);
std::filesystem::path emit_trainer_config(const RunRecord& run, const ExperimentConfig& config,
                                          const Workspace& workspace);

// Reads <dir>/<image_id>.txt for every image of `test`. Missing files (or a
// missing directory) mean no detections. Files for ids outside `test` and
// class ids outside its class table are errors.
std::vector<Detection> ingest_predictions(const std::filesystem::path& dir, const Dataset& test);
// One prediction file per image in `images`, possibly empty.
void write_prediction_files(const std::filesystem::path& dir, const Dataset& images,
                            std::span<const Detection> detections);

RunRecord evaluate_run(const RunRecord& run, std::span<const Detection> detections,
                       std::span<const GroundTruth> ground_truth, const EvalConfig& config);

// --- command-level entry points shared by the CLI and the tests ------------

struct CommandOptions {
  int jobs = 1;
  // Restricts run-level commands to these run ids when non-empty.
  std::vector<std::string> only_runs;
};

// Writes a planned record for every run that has none yet. Returns the
// stored records in plan order.
std::vector<RunRecord> command_plan(const ExperimentConfig& config, const CommandOptions& opts);
// Splits the labeled dataset into splits/, then prepares every run.
std::vector<RunRecord> command_prepare(const ExperimentConfig& config, const CommandOptions& opts);
std::vector<std::filesystem::path> command_emit_config(const ExperimentConfig& config,
                                                       const CommandOptions& opts);
// Evaluates every run that has a predictions directory.
std::vector<RunRecord> command_evaluate(const ExperimentConfig& config, const CommandOptions& opts);
// Renders all evaluated records into reports/. Returns the files written.
std::vector<std::filesystem::path> command_report(const ExperimentConfig& config);
// Writes reports/stats.{csv,txt} and returns the text rendering.
std::string command_stats(const ExperimentConfig& config);
// Materializes `variants` augmented copies of each image under `input`.
Dataset command_augment_offline(const ExperimentConfig& config, const std::filesystem::path& input,
                                const std::filesystem::path& output, int variants, int jobs);

// Stored records for the planned runs, falling back to the planned record.
std::vector<RunRecord> load_records(const ExperimentConfig& config);

}  // namespace detmix
