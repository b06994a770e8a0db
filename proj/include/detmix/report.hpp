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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detmix/harness.hpp"

namespace detmix {

// Half-up rounding of the shortest decimal form of `v` to thousandths,
// returned as an integer count of thousandths. 0.8725 maps to 873.
long long round_half_up_milli(double v);
// 873 -> "0.873", -12 -> "-0.012".
std::string format_milli(long long milli);

enum class ReportMetric { kMap50, kMap50_95 };

const char* to_string(ReportMetric m);

struct ReportColumn {
  std::string model;
  InitMode init = InitMode::kPretrained;

  // "yolov8n (COCO)" for pretrained weights, "yolov8n (Scratch)" otherwise.
  std::string label() const;
  friend bool operator==(const ReportColumn&, const ReportColumn&) = default;
};

// Rows are conditions in table order, columns in order of first appearance
// among the records. A cell is empty when no evaluated run covers it.
struct ReportTable {
  ReportMetric metric = ReportMetric::kMap50;
  std::vector<Condition> rows;
  std::vector<ReportColumn> columns;
  std::vector<std::vector<std::optional<long long>>> milli;  // [row][column]
  std::vector<std::vector<bool>> best;                      // [row][column]

  std::string csv() const;
  std::string text() const;
};

struct RenderedReport {
  ReportTable map50;
  ReportTable map50_95;
};

// Uses only evaluated records; throws detmix::Error when there are none.
RenderedReport render_report(std::span<const RunRecord> records);
// report_map50.{csv,txt} and report_map5095.{csv,txt}.
std::vector<std::filesystem::path> write_report(const RenderedReport& report,
                                                const std::filesystem::path& dir);

// Improvement of the best condition over the no-augmentation baseline for
// one column of one table. Values are in thousandths after rounding.
struct ColumnStats {
  ReportMetric metric = ReportMetric::kMap50;
  ReportColumn column;
  long long baseline_milli = 0;
  Condition best_condition;
  long long best_milli = 0;
  long long delta_milli = 0;
  // delta / baseline, absent for a zero baseline.
  std::optional<double> relative_delta;
};

// Every column of both tables. Throws detmix::Error when a column lacks an
// evaluated baseline run. Ties for best go to the earlier row.
std::vector<ColumnStats> run_stats(std::span<const RunRecord> records);
std::vector<ColumnStats> run_stats(const RenderedReport& report);
std::string format_run_stats_csv(std::span<const ColumnStats> stats);
std::string format_run_stats_text(std::span<const ColumnStats> stats);

}  // namespace detmix
