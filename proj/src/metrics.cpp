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

#include "detmix/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <utility>

#include "detmix/error.hpp"
#include "detmix/parallel.hpp"
#include "detmix/sample.hpp"
#include "detmix/text.hpp"

namespace detmix {
namespace {

// Indices sorted by descending confidence; equal confidences keep input order.
template <typename GetConfidence>
void sort_by_confidence(std::vector<std::size_t>& idx, GetConfidence conf) {
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return conf(a) > conf(b); });
}

using GroupKey = std::pair<std::string, int>;

struct Group {
  std::vector<std::size_t> dets;
  std::vector<std::size_t> gts;
};

std::vector<double> per_class_ap(const MatchResult& m, const std::vector<int>& class_ids) {
  std::vector<double> aps;
  aps.reserve(class_ids.size());
  for (int c : class_ids) aps.push_back(average_precision(pr_curve(m, c)));
  return aps;
}

std::vector<int> classes_with_gt(std::span<const GroundTruth> gts) {
  std::vector<int> ids;
  for (const GroundTruth& g : gts) ids.push_back(g.class_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw Error("mAP is undefined: no class has ground truth");
  return ids;
}

// Mean in the given order; shared so every mAP path rounds identically.
double mean_of(const std::vector<double>& values) {
  double sum = 0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<GroundTruth> ground_truth_of(const Dataset& dataset) {
  std::vector<GroundTruth> out;
  for (const Sample& s : dataset.samples) {
    for (const Annotation& a : s.annotations) out.push_back({s.image_id, a.class_id, a.box});
  }
  return out;
}

std::array<double, kNumIouThresholds> coco_iou_thresholds() {
  std::array<double, kNumIouThresholds> t{};
  for (int i = 0; i < kNumIouThresholds; ++i) t[i] = (50 + 5 * i) / 100.0;
  return t;
}

std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  sort_by_confidence(order, [&](std::size_t i) { return dets[i].confidence; });

  std::vector<bool> removed(dets.size(), false);
  std::vector<Detection> kept;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const std::size_t i = order[a];
    if (removed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t j = order[b];
      if (removed[j] || dets[j].class_id != dets[i].class_id) continue;
      if (iou(dets[i].box, dets[j].box) > iou_threshold) removed[j] = true;
    }
  }
  return kept;
}

MatchResult match(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                  double iou_threshold, int jobs) {
  MatchResult result;
  result.detections.resize(dets.size());

  std::map<GroupKey, Group> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    result.detections[i].class_id = dets[i].class_id;
    result.detections[i].confidence = dets[i].confidence;
    groups[{dets[i].image_id, dets[i].class_id}].dets.push_back(i);
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    groups[{gts[i].image_id, gts[i].class_id}].gts.push_back(i);
    ++result.gt_count_per_class[gts[i].class_id];
    result.unmatched_gt_per_image[gts[i].image_id];
  }

  std::vector<Group*> work;
  work.reserve(groups.size());
  for (auto& [key, g] : groups) work.push_back(&g);

  // Groups touch disjoint detection entries.
  parallel_for(work.size(), jobs, [&](std::size_t w) {
    Group& g = *work[w];
    sort_by_confidence(g.dets, [&](std::size_t i) { return dets[i].confidence; });
    std::vector<bool> taken(g.gts.size(), false);
    for (std::size_t di : g.dets) {
      double best = -1;
      int best_k = -1;
      for (std::size_t k = 0; k < g.gts.size(); ++k) {
        if (taken[k]) continue;
        const double v = iou(dets[di].box, gts[g.gts[k]].box);
        if (v > best) {
          best = v;
          best_k = static_cast<int>(k);
        }
      }
      if (best_k >= 0 && best >= iou_threshold) {
        taken[static_cast<std::size_t>(best_k)] = true;
        result.detections[di].true_positive = true;
        result.detections[di].matched_gt = static_cast<int>(g.gts[static_cast<std::size_t>(best_k)]);
      }
    }
  });

  for (auto& [key, g] : groups) {
    int unmatched = static_cast<int>(g.gts.size());
    for (std::size_t di : g.dets) unmatched -= result.detections[di].true_positive ? 1 : 0;
    if (!g.gts.empty()) result.unmatched_gt_per_image[key.first] += unmatched;
  }
  return result;
}

PrecisionRecallF1 precision_recall_f1(const MatchResult& m, double confidence_threshold) {
  long long tp = 0;
  long long fp = 0;
  for (const auto& e : m.detections) {
    if (e.confidence < confidence_threshold) continue;
    (e.true_positive ? tp : fp) += 1;
  }
  long long gt = 0;
  for (const auto& [cls, n] : m.gt_count_per_class) gt += n;

  if (tp + fp == 0) {
    if (gt == 0) return {1, 1, 1};
    return {0, 0, 0};
  }
  PrecisionRecallF1 out;
  out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  out.recall = gt == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(gt);
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0 ? 2 * out.precision * out.recall / denom : 0;
  return out;
}

PRCurve pr_curve(const MatchResult& m, int class_id) {
  PRCurve curve;
  if (auto it = m.gt_count_per_class.find(class_id); it != m.gt_count_per_class.end()) {
    curve.gt_count = it->second;
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.detections.size(); ++i) {
    if (m.detections[i].class_id == class_id) idx.push_back(i);
  }
  sort_by_confidence(idx, [&](std::size_t i) { return m.detections[i].confidence; });

  int tp = 0;
  int fp = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const auto& e = m.detections[idx[a]];
    (e.true_positive ? tp : fp) += 1;
    const bool last_of_tie =
        a + 1 == idx.size() || m.detections[idx[a + 1]].confidence != e.confidence;
    if (!last_of_tie) continue;
    PRPoint p;
    p.confidence = e.confidence;
    p.tp = tp;
    p.fp = fp;
    p.precision = static_cast<double>(tp) / (tp + fp);
    p.recall = curve.gt_count > 0 ? static_cast<double>(tp) / curve.gt_count : 0.0;
    curve.points.push_back(p);
  }
  return curve;
}

double average_precision(const PRCurve& curve) {
  if (!curve.defined() || curve.points.empty()) return 0.0;
  const std::size_t n = curve.points.size();
  std::vector<double> envelope(n);
  double running = 0;
  for (std::size_t i = n; i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    envelope[i] = running;
  }
  // Recall level r/100 is reached once tp * 100 >= r * gt (exact integers).
  const long long gt = curve.gt_count;
  double sum = 0;
  std::size_t first = 0;
  for (long long r = 0; r <= 100; ++r) {
    while (first < n && static_cast<long long>(curve.points[first].tp) * 100 < r * gt) ++first;
    if (first == n) break;
    sum += envelope[first];
  }
  return sum / 101.0;
}

double map_at(std::span<const Detection> dets, std::span<const GroundTruth> gts,
              double iou_threshold, int jobs) {
  const std::vector<int> classes = classes_with_gt(gts);
  return mean_of(per_class_ap(match(dets, gts, iou_threshold, jobs), classes));
}

double map_range(std::span<const Detection> dets, std::span<const GroundTruth> gts, int jobs) {
  std::vector<double> per_threshold;
  for (double t : coco_iou_thresholds()) per_threshold.push_back(map_at(dets, gts, t, jobs));
  return mean_of(per_threshold);
}

EvalReport evaluate(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                    const EvalConfig& config) {
  EvalReport report;
  report.class_ids = classes_with_gt(gts);
  report.reporting_confidence = config.reporting_confidence;
  report.provenance = config.provenance;
  report.ap.assign(report.class_ids.size(), {});

  const auto thresholds = coco_iou_thresholds();
  std::vector<double> per_threshold;
  for (int t = 0; t < kNumIouThresholds; ++t) {
    const MatchResult m = match(dets, gts, thresholds[t], config.jobs);
    const std::vector<double> aps = per_class_ap(m, report.class_ids);
    for (std::size_t c = 0; c < aps.size(); ++c) report.ap[c][t] = aps[c];
    per_threshold.push_back(mean_of(aps));
    if (t == 0) {
      const PrecisionRecallF1 prf = precision_recall_f1(m, config.reporting_confidence);
      report.precision = prf.precision;
      report.recall = prf.recall;
      report.f1 = prf.f1;
    }
  }
  report.map50 = per_threshold[0];
  report.map50_95 = mean_of(per_threshold);
  return report;
}

std::string to_key_value(const EvalReport& r) {
  std::ostringstream out;
  out << "provenance=" << r.provenance << '\n';
  out << "reporting_confidence=" << format_double(r.reporting_confidence) << '\n';
  out << "map50=" << format_double(r.map50) << '\n';
  out << "map50_95=" << format_double(r.map50_95) << '\n';
  out << "precision=" << format_double(r.precision) << '\n';
  out << "recall=" << format_double(r.recall) << '\n';
  out << "f1=" << format_double(r.f1) << '\n';
  out << "classes=";
  for (std::size_t c = 0; c < r.class_ids.size(); ++c) out << (c ? "," : "") << r.class_ids[c];
  out << '\n';
  for (std::size_t c = 0; c < r.class_ids.size(); ++c) {
    out << "ap." << r.class_ids[c] << '=';
    for (int t = 0; t < kNumIouThresholds; ++t) out << (t ? "," : "") << format_double(r.ap[c][t]);
    out << '\n';
  }
  return out.str();
}

EvalReport eval_report_from_key_value(const std::string& text) {
  EvalReport r;
  std::map<int, std::array<double, kNumIouThresholds>> aps;
  for (const std::string& line : read_lines(text)) {
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("report: missing '=' in line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (key == "provenance") {
      r.provenance = std::string(value);
    } else if (key == "reporting_confidence") {
      r.reporting_confidence = parse_double(value);
    } else if (key == "map50") {
      r.map50 = parse_double(value);
    } else if (key == "map50_95") {
      r.map50_95 = parse_double(value);
    } else if (key == "precision") {
      r.precision = parse_double(value);
    } else if (key == "recall") {
      r.recall = parse_double(value);
    } else if (key == "f1") {
      r.f1 = parse_double(value);
    } else if (key == "classes") {
      if (!value.empty()) {
        for (auto part : split(value, ',')) r.class_ids.push_back(static_cast<int>(parse_int(part)));
      }
    } else if (key.rfind("ap.", 0) == 0) {
      const int cls = static_cast<int>(parse_int(std::string_view(key).substr(3)));
      const auto parts = split(value, ',');
      if (parts.size() != kNumIouThresholds) throw ParseError("report: " + key + " needs 10 values");
      auto& row = aps[cls];
      for (int t = 0; t < kNumIouThresholds; ++t) row[t] = parse_double(parts[t]);
    } else {
      throw ParseError("report: unknown key '" + key + "'");
    }
  }
  for (int c : r.class_ids) {
    auto it = aps.find(c);
    if (it == aps.end()) throw ParseError("report: missing ap." + std::to_string(c));
    r.ap.push_back(it->second);
  }
  return r;
}

std::string eval_csv_header() { return "provenance,map50,map50_95,precision,recall,f1"; }

std::string to_csv_row(const EvalReport& r) {
  return csv_escape(r.provenance) + "," + format_double(r.map50) + "," +
         format_double(r.map50_95) + "," + format_double(r.precision) + "," +
         format_double(r.recall) + "," + format_double(r.f1);
}

}  // namespace detmix
