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

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "detmix/geom.hpp"

namespace detmix {

struct Dataset;

// A predicted box. `confidence` is the detector's Pc score in [0, 1].
struct Detection {
  std::string image_id;
  int class_id = 0;
  BBox box;
  double confidence = 0;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruth {
  std::string image_id;
  int class_id = 0;
  BBox box;
};

// Ground-truth boxes of every annotation in `dataset`.
std::vector<GroundTruth> ground_truth_of(const Dataset& dataset);

// IoU thresholds 0.50, 0.55, ..., 0.95.
inline constexpr int kNumIouThresholds = 10;
std::array<double, kNumIouThresholds> coco_iou_thresholds();

// Greedy per-class suppression on one image: keeps the most confident box and
// drops same-class boxes overlapping it by IoU > iou_threshold. The output is
// ordered by descending confidence, ties in input order.
std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold);

struct MatchResult {
  struct Entry {
    int class_id = 0;
    double confidence = 0;
    bool true_positive = false;
    int matched_gt = -1;  // index into the ground-truth list, or -1
  };
  // One entry per detection, in input order.
  std::vector<Entry> detections;
  std::map<int, int> gt_count_per_class;
  std::map<std::string, int> unmatched_gt_per_image;
};

// Per image and class, detections in descending confidence claim the unmatched
// ground truth with the highest IoU if that IoU >= iou_threshold.
MatchResult match(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                  double iou_threshold, int jobs = 1);

struct PrecisionRecallF1 {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Pooled over classes, counting detections with confidence >= threshold.
// No detections and no ground truth yields (1, 1, 1); no detections with
// ground truth present yields (0, 0, 0).
PrecisionRecallF1 precision_recall_f1(const MatchResult& m, double confidence_threshold);

struct PRPoint {
  double confidence = 0;
  double precision = 0;
  double recall = 0;
  int tp = 0;
  int fp = 0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // confidence strictly decreasing
  int gt_count = 0;
  // False when the class has no ground truth; such classes are left out of mAP.
  bool defined() const { return gt_count > 0; }
};

PRCurve pr_curve(const MatchResult& m, int class_id);

// 101-point interpolated AP over recall levels 0.00, 0.01, ..., 1.00.
double average_precision(const PRCurve& curve);

// Mean AP over classes having ground truth. Throws detmix::Error when no
// class has ground truth.
double map_at(std::span<const Detection> dets, std::span<const GroundTruth> gts,
              double iou_threshold, int jobs = 1);
// Mean of map_at over the ten COCO thresholds.
double map_range(std::span<const Detection> dets, std::span<const GroundTruth> gts, int jobs = 1);

struct EvalConfig {
  double reporting_confidence = 0.25;
  std::string provenance;
  int jobs = 1;
};

struct EvalReport {
  std::vector<int> class_ids;  // classes with ground truth, ascending
  // ap[c][t]: class class_ids[c] at threshold coco_iou_thresholds()[t].
  std::vector<std::array<double, kNumIouThresholds>> ap;
  double map50 = 0;
  double map50_95 = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double reporting_confidence = 0.25;
  std::string provenance;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Throws detmix::Error when no class has ground truth.
EvalReport evaluate(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                    const EvalConfig& config = {});

// Flat `key=value` lines; doubles use round-trip formatting.
std::string to_key_value(const EvalReport& report);
EvalReport eval_report_from_key_value(const std::string& text);
std::string eval_csv_header();
std::string to_csv_row(const EvalReport& report);

}  // namespace detmix
