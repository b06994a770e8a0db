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
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "detmix/metrics.hpp"
#include "detmix/sample.hpp"

namespace detmix {

// Class table used by the bundled configs.
inline const std::vector<std::string> kDefaultClasses = {"sugar_beet", "dicot", "monocot"};

// --- label and prediction files -------------------------------------------
//
// Label line:      `class_id cx cy w h`
// Prediction line: `class_id conf cx cy w h`
// Normalized floats written with 6 decimals, LF-terminated.

std::string format_label_line(const Annotation& a);
std::string format_labels(std::span<const Annotation> annotations);
// `source` names the file in error messages ("<source>:<line>: ...").
std::vector<Annotation> parse_labels(std::string_view text, std::size_t num_classes,
                                     const std::string& source);

std::string format_prediction_line(const Detection& d);
std::vector<Detection> parse_predictions(std::string_view text, const std::string& image_id,
                                         const std::string& source);
std::vector<Detection> read_prediction_file(const std::filesystem::path& path,
                                            const std::string& image_id);

// --- directory datasets -----------------------------------------------------
//
// <root>/images/<id>.png|.jpg|.jpeg, <root>/labels/<id>.txt, <root>/classes.txt

// When `classes` is empty the table is read from <root>/classes.txt.
Dataset load_dataset(const std::filesystem::path& root, std::vector<std::string> classes = {},
                     Origin origin = Origin::kReal, int jobs = 1);
// Writes PNG images, canonical label files (one per image, possibly empty)
// and classes.txt. Existing files with the same names are overwritten.
void write_dataset(const Dataset& dataset, const std::filesystem::path& root, int jobs = 1);

// --- splitting and mixing -----------------------------------------------------

struct SplitSpec {
  double train_fraction = 0.70;
  double val_fraction = 0.15;
  double test_fraction = 0.15;
  std::uint64_t seed = 0;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

struct DatasetSplit {
  Dataset train;
  Dataset val;
  Dataset test;
};

// floor(train_fraction * n), floor(val_fraction * n), and the remainder.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);
// Seeded uniform shuffle, then sizes from split_sizes. Throws for n < 3.
DatasetSplit split(const Dataset& dataset, const SplitSpec& spec);

struct MixPlan {
  int share_percent = 100;  // s: synthetic images added as a percentage of T
  std::uint64_t seed = 0;
};

// floor(s * T / 100).
std::size_t synthetic_count(std::size_t base_size, int share_percent);

// `train` followed by the first synthetic_count(|train|, s) samples of a
// seeded permutation of `pool`; larger shares extend smaller ones.
Dataset mix_synthetic(const Dataset& train, const Dataset& pool, const MixPlan& plan);

// --- pseudo-labeling ----------------------------------------------------------

struct PseudoLabelOptions {
  double conf_threshold = 0.25;
  double nms_iou = 0.7;
};

// Turns confident, NMS-surviving predictions into annotations of `images`
// (whose own annotations are replaced). Output samples are synthetic.
Dataset pseudo_label(const Dataset& images,
                     const std::map<std::string, std::vector<Detection>>& predictions,
                     const PseudoLabelOptions& options = {});

// --- statistics -----------------------------------------------------------------

inline constexpr int kBoxSizeBins = 10;

struct DatasetStats {
  std::size_t num_samples = 0;
  std::size_t num_annotations = 0;
  std::vector<std::size_t> per_class;
  std::array<std::size_t, 3> per_origin{};  // indexed by Origin
  // Histogram of sqrt(w * h) over [0, 1] in equal-width bins.
  std::array<std::size_t, kBoxSizeBins> box_size_histogram{};

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const Dataset& dataset);
std::string format_stats(const Dataset& dataset, const DatasetStats& stats);

}  // namespace detmix
