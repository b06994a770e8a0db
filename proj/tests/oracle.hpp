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

// Naive reference implementations used as test oracles. They share no code
// with the library beyond the plain data types, and compute in exact rational
// arithmetic wherever the library uses floating point.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "detmix/geom.hpp"
#include "detmix/metrics.hpp"

namespace detmix::oracle {

using Rational = boost::multiprecision::cpp_rational;

// Every finite double is a dyadic rational, so this conversion is exact.
inline Rational exact(double v) { return Rational(v); }

inline Rational exact_iou(const BBox& a, const BBox& b) {
  const Rational ax0 = exact(a.x_min()), ax1 = exact(a.x_max());
  const Rational ay0 = exact(a.y_min()), ay1 = exact(a.y_max());
  const Rational bx0 = exact(b.x_min()), bx1 = exact(b.x_max());
  const Rational by0 = exact(b.y_min()), by1 = exact(b.y_max());
  const Rational iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const Rational ih = std::min(ay1, by1) - std::max(ay0, by0);
  if (iw <= 0 || ih <= 0) return 0;
  const Rational inter = iw * ih;
  const Rational uni = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter;
  return inter / uni;
}

// Greedy NMS written the other way round: a candidate survives when no
// already-kept box of its class overlaps it too much.
inline std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  // Insertion sort keeps equal confidences in input order.
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t j = i; j > 0 && dets[order[j]].confidence > dets[order[j - 1]].confidence; --j) {
      std::swap(order[j], order[j - 1]);
    }
  }
  const Rational thr = exact(iou_threshold);
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    bool survives = true;
    for (const Detection& k : kept) {
      if (k.class_id == dets[i].class_id && exact_iou(k.box, dets[i].box) > thr) survives = false;
    }
    if (survives) kept.push_back(dets[i]);
  }
  return kept;
}

struct OracleOutcome {
  double confidence;
  bool tp;
};

// Per-class outcomes of greedy matching, in descending confidence order with
// ties in input order.
inline std::map<int, std::vector<OracleOutcome>> match(const std::vector<Detection>& dets,
                                                       const std::vector<GroundTruth>& gts,
                                                       double iou_threshold) {
  const Rational thr = exact(iou_threshold);
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  std::vector<bool> used(gts.size(), false);
  std::map<int, std::vector<OracleOutcome>> out;
  for (std::size_t i : order) {
    const Detection& d = dets[i];
    Rational best = -1;
    std::size_t best_g = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image_id != d.image_id || gts[g].class_id != d.class_id) continue;
      const Rational v = exact_iou(d.box, gts[g].box);
      if (v > best) {
        best = v;
        best_g = g;
      }
    }
    const bool tp = best_g < gts.size() && best >= thr;
    if (tp) used[best_g] = true;
    out[d.class_id].push_back({d.confidence, tp});
  }
  return out;
}

// 101-point interpolated AP straight from the definition: for each recall
// level, the best precision at any operating point (a confidence cut that
// keeps whole tie groups) whose recall reaches the level.
inline Rational average_precision(const std::vector<OracleOutcome>& outcomes, long long gt_count) {
  struct Point {
    Rational precision;
    Rational recall;
  };
  std::vector<Point> points;
  long long tp = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    tp += outcomes[i].tp ? 1 : 0;
    const bool group_end = i + 1 == outcomes.size() || outcomes[i + 1].confidence != outcomes[i].confidence;
    if (group_end) {
      points.push_back({Rational(tp, static_cast<long long>(i + 1)), Rational(tp, gt_count)});
    }
  }
  Rational sum = 0;
  for (int r = 0; r <= 100; ++r) {
    const Rational level(r, 100);
    Rational best = 0;
    for (const Point& p : points) {
      if (p.recall >= level && p.precision > best) best = p.precision;
    }
    sum += best;
  }
  return sum / 101;
}

inline std::vector<int> gt_classes(const std::vector<GroundTruth>& gts) {
  std::set<int> s;
  for (const GroundTruth& g : gts) s.insert(g.class_id);
  return {s.begin(), s.end()};
}

inline Rational map_at(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                       double iou_threshold) {
  const auto outcomes = match(dets, gts, iou_threshold);
  const auto classes = gt_classes(gts);
  Rational total = 0;
  for (int c : classes) {
    long long n = 0;
    for (const GroundTruth& g : gts) n += g.class_id == c ? 1 : 0;
    auto it = outcomes.find(c);
    total += it == outcomes.end() ? Rational(0) : average_precision(it->second, n);
  }
  return total / static_cast<long long>(classes.size());
}

inline Rational map_range(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts) {
  Rational total = 0;
  for (int i = 0; i < 10; ++i) total += map_at(dets, gts, (50 + 5 * i) / 100.0);
  return total / 10;
}

struct OracleReport {
  Rational map50;
  Rational map50_95;
  Rational precision;
  Rational recall;
  Rational f1;
};

inline OracleReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                             double reporting_confidence) {
  OracleReport r;
  r.map50 = map_at(dets, gts, 0.5);
  r.map50_95 = map_range(dets, gts);
  long long tp = 0, fp = 0;
  for (const auto& [cls, list] : match(dets, gts, 0.5)) {
    for (const OracleOutcome& o : list) {
      if (o.confidence >= reporting_confidence) (o.tp ? tp : fp) += 1;
    }
  }
  const long long gt = static_cast<long long>(gts.size());
  if (tp + fp == 0) {
    r.precision = r.recall = r.f1 = gt == 0 ? 1 : 0;
    return r;
  }
  r.precision = Rational(tp, tp + fp);
  r.recall = gt == 0 ? Rational(1) : Rational(tp, gt);
  r.f1 = r.precision + r.recall == 0 ? Rational(0)
                                     : 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace detmix::oracle
