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

#include "detmix/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "detmix/error.hpp"
#include "detmix/image_io.hpp"
#include "detmix/text.hpp"

namespace fs = std::filesystem;

namespace detmix {
namespace {

ReportTable build_table(ReportMetric metric, std::span<const RunRecord> evaluated,
                        const std::vector<Condition>& rows,
                        const std::vector<ReportColumn>& columns) {
  ReportTable t;
  t.metric = metric;
  t.rows = rows;
  t.columns = columns;
  t.milli.assign(rows.size(), std::vector<std::optional<long long>>(columns.size()));
  t.best.assign(rows.size(), std::vector<bool>(columns.size(), false));
  for (const RunRecord& r : evaluated) {
    const auto ri = std::find(rows.begin(), rows.end(), r.condition) - rows.begin();
    const auto ci = std::find(columns.begin(), columns.end(), ReportColumn{r.model, r.init}) -
                    columns.begin();
    auto& cell = t.milli[static_cast<std::size_t>(ri)][static_cast<std::size_t>(ci)];
    if (cell) {
      throw Error("report: two evaluated runs for " + display_name(r.condition) + " / " +
                  ReportColumn{r.model, r.init}.label());
    }
    cell = round_half_up_milli(metric == ReportMetric::kMap50 ? r.report->map50
                                                              : r.report->map50_95);
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::optional<long long> top;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (t.milli[r][c] && (!top || *t.milli[r][c] > *top)) top = t.milli[r][c];
    }
    for (std::size_t r = 0; r < rows.size(); ++r) t.best[r][c] = top && t.milli[r][c] == top;
  }
  return t;
}

std::string cell_text(const ReportTable& t, std::size_t r, std::size_t c) {
  if (!t.milli[r][c]) return "";
  return format_milli(*t.milli[r][c]) + (t.best[r][c] ? "*" : "");
}

std::vector<const RunRecord*> evaluated_only(std::span<const RunRecord> records) {
  std::vector<const RunRecord*> out;
  for (const RunRecord& r : records) {
    if (r.status == RunStatus::kEvaluated) {
      r.validate();
      out.push_back(&r);
    }
  }
  return out;
}

std::vector<ColumnStats> stats_of(const ReportTable& t) {
  const auto base_it = std::find(t.rows.begin(), t.rows.end(), Condition::none());
  std::vector<ColumnStats> out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (base_it == t.rows.end() || !t.milli[base_it - t.rows.begin()][c]) {
      throw Error("stats: column " + t.columns[c].label() + " has no evaluated baseline run");
    }
    ColumnStats s;
    s.metric = t.metric;
    s.column = t.columns[c];
    s.baseline_milli = *t.milli[base_it - t.rows.begin()][c];
    bool have_best = false;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (t.milli[r][c] && (!have_best || *t.milli[r][c] > s.best_milli)) {
        have_best = true;
        s.best_milli = *t.milli[r][c];
        s.best_condition = t.rows[r];
      }
    }
    s.delta_milli = s.best_milli - s.baseline_milli;
    if (s.baseline_milli != 0) {
      s.relative_delta = static_cast<double>(s.delta_milli) / static_cast<double>(s.baseline_milli);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

long long round_half_up_milli(double v) {
  if (!std::isfinite(v)) throw Error("cannot round a non-finite value");
  const bool negative = v < 0;
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(v), std::chars_format::fixed);
  if (res.ec != std::errc()) throw Error("value too large to round");
  const std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? "" : s.substr(dot + 1);
  long long milli = 0;
  for (char ch : whole) milli = milli * 10 + (ch - '0');
  for (std::size_t i = 0; i < 3; ++i) milli = milli * 10 + (i < frac.size() ? frac[i] - '0' : 0);
  if (frac.size() > 3 && frac[3] >= '5') ++milli;
  return negative ? -milli : milli;
}

std::string format_milli(long long milli) {
  const bool negative = milli < 0;
  const long long a = negative ? -milli : milli;
  std::string frac = std::to_string(a % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(a / 1000) + "." + frac;
}

const char* to_string(ReportMetric m) {
  return m == ReportMetric::kMap50 ? "mAP50" : "mAP50-95";
}

std::string ReportColumn::label() const {
  return model + (init == InitMode::kPretrained ? " (COCO)" : " (Scratch)");
}

std::string ReportTable::csv() const {
  std::ostringstream out;
  out << "condition";
  for (const ReportColumn& c : columns) out << ',' << c.label();
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << display_name(rows[r]);
    for (std::size_t c = 0; c < columns.size(); ++c) out << ',' << cell_text(*this, r, c);
    out << '\n';
  }
  return out.str();
}

std::string ReportTable::text() const {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({to_string(metric)});
  for (const ReportColumn& c : columns) grid[0].push_back(c.label());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> line{display_name(rows[r])};
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string cell = cell_text(*this, r, c);
      line.push_back(cell.empty() ? "-" : cell);
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::ostringstream out;
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i == 0) {
        out << line[i] << std::string(width[i] - line[i].size(), ' ');
      } else {
        // Values are right-aligned, leaving room for the best-value flag.
        const std::string padded = line[i].ends_with('*') ? line[i] : line[i] + " ";
        out << "  " << std::string(width[i] + 1 - std::min(width[i] + 1, padded.size()), ' ')
            << padded;
      }
    }
    out << '\n';
  }
  out << "* best value in column\n";
  return out.str();
}

RenderedReport render_report(std::span<const RunRecord> records) {
  const auto evaluated = evaluated_only(records);
  if (evaluated.empty()) throw Error("report: no evaluated runs");
  std::vector<Condition> rows;
  std::vector<ReportColumn> columns;
  std::vector<RunRecord> subset;
  for (const RunRecord* r : evaluated) {
    if (std::find(rows.begin(), rows.end(), r->condition) == rows.end()) rows.push_back(r->condition);
    const ReportColumn col{r->model, r->init};
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    subset.push_back(*r);
  }
  std::sort(rows.begin(), rows.end());
  return {build_table(ReportMetric::kMap50, subset, rows, columns),
          build_table(ReportMetric::kMap50_95, subset, rows, columns)};
}

std::vector<fs::path> write_report(const RenderedReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
  const std::vector<std::pair<fs::path, std::string>> files = {
      {dir / "report_map50.csv", report.map50.csv()},
      {dir / "report_map50.txt", report.map50.text()},
      {dir / "report_map5095.csv", report.map50_95.csv()},
      {dir / "report_map5095.txt", report.map50_95.text()},
  };
  std::vector<fs::path> written;
  for (const auto& [path, body] : files) {
    write_text_atomic(path, body);
    written.push_back(path);
  }
  return written;
}

std::vector<ColumnStats> run_stats(std::span<const RunRecord> records) {
  return run_stats(render_report(records));
}

std::vector<ColumnStats> run_stats(const RenderedReport& report) {
  auto out = stats_of(report.map50);
  auto second = stats_of(report.map50_95);
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

std::string format_run_stats_csv(std::span<const ColumnStats> stats) {
  std::ostringstream out;
  out << "metric,column,baseline,best_condition,best,delta,relative_delta\n";
  for (const ColumnStats& s : stats) {
    out << to_string(s.metric) << ',' << s.column.label() << ',' << format_milli(s.baseline_milli)
        << ',' << display_name(s.best_condition) << ',' << format_milli(s.best_milli) << ','
        << format_milli(s.delta_milli) << ','
        << (s.relative_delta ? format_fixed(*s.relative_delta, 4) : "") << '\n';
  }
  return out.str();
}

std::string format_run_stats_text(std::span<const ColumnStats> stats) {
  std::ostringstream out;
  for (const ColumnStats& s : stats) {
    out << to_string(s.metric) << "  " << s.column.label() << ": baseline "
        << format_milli(s.baseline_milli) << ", best " << format_milli(s.best_milli) << " ("
        << display_name(s.best_condition) << "), delta " << format_milli(s.delta_milli);
    if (s.relative_delta) out << " (" << format_fixed(100.0 * *s.relative_delta, 1) << "%)";
    out << '\n';
  }
  return out.str();
}

}  // namespace detmix
