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

#include "detmix/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "detmix/error.hpp"
#include "detmix/image_io.hpp"
#include "detmix/parallel.hpp"
#include "detmix/rng.hpp"
#include "detmix/text.hpp"

namespace fs = std::filesystem;

namespace detmix {
namespace {

constexpr double kBoxTolerance = 1e-6;

[[noreturn]] void fail_at(const std::string& source, std::size_t line, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_unit(std::string_view field, const std::string& source, std::size_t line,
                  const char* name) {
  double v = 0;
  try {
    v = parse_double(field);
  } catch (const Error&) {
    fail_at(source, line, std::string(name) + " is not a number: '" + std::string(field) + "'");
  }
  if (!(v >= 0 && v <= 1)) {
    fail_at(source, line, std::string(name) + " outside [0, 1]: " + std::string(field));
  }
  return v;
}

BBox parse_box(std::span<const std::string_view> f, const std::string& source, std::size_t line) {
  const double cx = parse_unit(f[0], source, line, "cx");
  const double cy = parse_unit(f[1], source, line, "cy");
  const double w = parse_unit(f[2], source, line, "w");
  const double h = parse_unit(f[3], source, line, "h");
  if (w <= 0 || h <= 0) fail_at(source, line, "box has zero area");
  BBox box(cx, cy, w, h);
  if (box.is_valid(kBoxTolerance)) return box;
  auto clipped = clip_box(box, 0.0);
  if (!clipped) fail_at(source, line, "box lies outside the image");
  return *clipped;
}

int parse_class(std::string_view field, const std::string& source, std::size_t line) {
  long long v = 0;
  try {
    v = parse_int(field);
  } catch (const Error&) {
    fail_at(source, line, "class id is not an integer: '" + std::string(field) + "'");
  }
  if (v < 0 || v > 1'000'000) fail_at(source, line, "class id out of range: " + std::string(field));
  return static_cast<int>(v);
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<std::string> read_class_table(const fs::path& path) {
  std::vector<std::string> classes;
  for (const std::string& line : read_lines(read_text(path))) {
    const auto name = trim(line);
    if (!name.empty()) classes.emplace_back(name);
  }
  return classes;
}

void create_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
}

}  // namespace

const char* to_string(Origin origin) {
  switch (origin) {
    case Origin::kReal: return "real";
    case Origin::kSynthetic: return "synthetic";
    case Origin::kAugmented: return "augmented";
  }
  return "?";
}

void Dataset::validate() const {
  if (classes.empty()) throw Error("dataset '" + name + "': class table is empty");
  std::unordered_set<std::string> ids;
  for (const Sample& s : samples) {
    if (s.image_id.empty() || s.image_id.find('/') != std::string::npos) {
      throw Error("dataset '" + name + "': invalid image id '" + s.image_id + "'");
    }
    if (!ids.insert(s.image_id).second) {
      throw Error("dataset '" + name + "': duplicate image id '" + s.image_id + "'");
    }
    for (const Annotation& a : s.annotations) {
      if (a.class_id < 0 || static_cast<std::size_t>(a.class_id) >= classes.size()) {
        throw Error("dataset '" + name + "': image '" + s.image_id + "' has class id " +
                    std::to_string(a.class_id) + " outside the class table");
      }
      if (!a.box.is_valid(kBoxTolerance)) {
        throw Error("dataset '" + name + "': image '" + s.image_id + "' has an invalid box");
      }
    }
  }
}

std::string format_label_line(const Annotation& a) {
  return std::to_string(a.class_id) + " " + format_fixed(a.box.cx(), 6) + " " +
         format_fixed(a.box.cy(), 6) + " " + format_fixed(a.box.w(), 6) + " " +
         format_fixed(a.box.h(), 6) + "\n";
}

std::string format_labels(std::span<const Annotation> annotations) {
  std::string out;
  for (const Annotation& a : annotations) out += format_label_line(a);
  return out;
}

std::vector<Annotation> parse_labels(std::string_view text, std::size_t num_classes,
                                     const std::string& source) {
  std::vector<Annotation> out;
  const auto lines = read_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 5) {
      fail_at(source, i + 1, "expected 5 fields, got " + std::to_string(fields.size()));
    }
    const int cls = parse_class(fields[0], source, i + 1);
    if (static_cast<std::size_t>(cls) >= num_classes) {
      fail_at(source, i + 1,
              "class id " + std::to_string(cls) + " >= " + std::to_string(num_classes) + " classes");
    }
    out.push_back({cls, parse_box(std::span(fields).subspan(1), source, i + 1)});
  }
  return out;
}

std::string format_prediction_line(const Detection& d) {
  return std::to_string(d.class_id) + " " + format_fixed(d.confidence, 6) + " " +
         format_fixed(d.box.cx(), 6) + " " + format_fixed(d.box.cy(), 6) + " " +
         format_fixed(d.box.w(), 6) + " " + format_fixed(d.box.h(), 6) + "\n";
}

std::vector<Detection> parse_predictions(std::string_view text, const std::string& image_id,
                                         const std::string& source) {
  std::vector<Detection> out;
  const auto lines = read_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 6) {
      fail_at(source, i + 1, "expected 6 fields, got " + std::to_string(fields.size()));
    }
    Detection d;
    d.image_id = image_id;
    d.class_id = parse_class(fields[0], source, i + 1);
    d.confidence = parse_unit(fields[1], source, i + 1, "confidence");
    d.box = parse_box(std::span(fields).subspan(2), source, i + 1);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> read_prediction_file(const fs::path& path, const std::string& image_id) {
  return parse_predictions(read_text(path), image_id, path.string());
}

Dataset load_dataset(const fs::path& root, std::vector<std::string> classes, Origin origin,
                     int jobs) {
  if (!fs::is_directory(root)) throw IoError(root.string() + ": not a directory");
  Dataset ds;
  ds.name = root.filename().string();
  if (ds.name.empty()) ds.name = root.parent_path().filename().string();
  if (classes.empty()) {
    const fs::path table = root / "classes.txt";
    if (!fs::exists(table)) {
      throw IoError(root.string() + ": no class table given and classes.txt is missing");
    }
    classes = read_class_table(table);
  }
  ds.classes = std::move(classes);

  std::vector<fs::path> images;
  if (fs::is_directory(root / "images")) {
    for (const auto& entry : fs::directory_iterator(root / "images")) {
      if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
    }
  }
  std::sort(images.begin(), images.end());
  std::set<std::string> stems;
  for (const auto& p : images) {
    if (!stems.insert(p.stem().string()).second) {
      throw Error(root.string() + ": two images share the id '" + p.stem().string() + "'");
    }
  }

  ds.samples.resize(images.size());
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    Sample& s = ds.samples[i];
    s.image_id = images[i].stem().string();
    s.origin = origin;
    s.raster = read_image(images[i]);
    const fs::path label = root / "labels" / (s.image_id + ".txt");
    if (fs::exists(label)) {
      s.annotations = parse_labels(read_text(label), ds.classes.size(), label.string());
    }
  });
  return ds;
}

void write_dataset(const Dataset& dataset, const fs::path& root, int jobs) {
  dataset.validate();
  create_dir(root / "images");
  create_dir(root / "labels");
  std::string table;
  for (const std::string& c : dataset.classes) table += c + "\n";
  write_text_atomic(root / "classes.txt", table);
  parallel_for(dataset.samples.size(), jobs, [&](std::size_t i) {
    const Sample& s = dataset.samples[i];
    write_png(s.raster, root / "images" / (s.image_id + ".png"));
    write_text_atomic(root / "labels" / (s.image_id + ".txt"), format_labels(s.annotations));
  });
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0 && spec.val_fraction > 0 && spec.test_fraction > 0)) {
    throw Error("split fractions must be positive");
  }
  if (std::fabs(spec.train_fraction + spec.val_fraction + spec.test_fraction - 1.0) > 1e-9) {
    throw Error("split fractions must sum to 1");
  }
  // The guard keeps products such as 0.15 * 20 = 2.9999999999999996 at 3.
  auto floor_of = [n](double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  SplitSizes sizes;
  sizes.train = std::min(floor_of(spec.train_fraction), n);
  sizes.val = std::min(floor_of(spec.val_fraction), n - sizes.train);
  sizes.test = n - sizes.train - sizes.val;
  return sizes;
}

DatasetSplit split(const Dataset& dataset, const SplitSpec& spec) {
  const std::size_t n = dataset.samples.size();
  if (n < 3) throw Error("split needs at least 3 samples, got " + std::to_string(n));
  const SplitSizes sizes = split_sizes(n, spec);
  RngStream rng(spec.seed, "split", 0);
  const std::vector<std::size_t> order = rng.permutation(n);

  DatasetSplit out;
  out.train = {dataset.name + "/train", dataset.classes, {}};
  out.val = {dataset.name + "/val", dataset.classes, {}};
  out.test = {dataset.name + "/test", dataset.classes, {}};
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& dst = i < sizes.train ? out.train : i < sizes.train + sizes.val ? out.val : out.test;
    dst.samples.push_back(dataset.samples[order[i]]);
  }
  return out;
}

std::size_t synthetic_count(std::size_t base_size, int share_percent) {
  if (share_percent <= 0) throw Error("synthetic share must be a positive percentage");
  return base_size * static_cast<std::size_t>(share_percent) / 100;
}

Dataset mix_synthetic(const Dataset& train, const Dataset& pool, const MixPlan& plan) {
  const std::size_t m = synthetic_count(train.samples.size(), plan.share_percent);
  if (m > pool.samples.size()) {
    throw Error("synthetic share " + std::to_string(plan.share_percent) + "% of " +
                std::to_string(train.samples.size()) + " needs " + std::to_string(m) +
                " synthetic images but the pool holds " + std::to_string(pool.samples.size()));
  }
  if (pool.classes != train.classes) {
    throw Error("synthetic pool and training set use different class tables");
  }
  for (const Sample& s : pool.samples) {
    if (s.origin != Origin::kSynthetic) {
      throw Error("synthetic pool sample '" + s.image_id + "' is not marked synthetic");
    }
  }
  Dataset out{train.name + "+synthetic" + std::to_string(plan.share_percent), train.classes,
              train.samples};
  RngStream rng(plan.seed, "synthetic-mix", 0);
  const std::vector<std::size_t> order = rng.permutation(pool.samples.size());
  out.samples.reserve(train.samples.size() + m);
  for (std::size_t i = 0; i < m; ++i) out.samples.push_back(pool.samples[order[i]]);
  out.validate();
  return out;
}

Dataset pseudo_label(const Dataset& images,
                     const std::map<std::string, std::vector<Detection>>& predictions,
                     const PseudoLabelOptions& options) {
  std::unordered_set<std::string> known;
  for (const Sample& s : images.samples) known.insert(s.image_id);
  for (const auto& [id, dets] : predictions) {
    if (!known.count(id)) throw Error("pseudo_label: predictions for unknown image '" + id + "'");
  }
  Dataset out{images.name, images.classes, {}};
  out.samples.reserve(images.samples.size());
  for (const Sample& s : images.samples) {
    Sample labeled{s.image_id, s.raster, {}, Origin::kSynthetic};
    if (auto it = predictions.find(s.image_id); it != predictions.end()) {
      for (const Detection& d : nms(it->second, options.nms_iou)) {
        if (d.confidence < options.conf_threshold) continue;
        if (d.class_id < 0 || static_cast<std::size_t>(d.class_id) >= images.classes.size()) {
          throw Error("pseudo_label: class id " + std::to_string(d.class_id) +
                      " outside the class table");
        }
        labeled.annotations.push_back({d.class_id, d.box});
      }
    }
    out.samples.push_back(std::move(labeled));
  }
  return out;
}

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats st;
  st.num_samples = dataset.samples.size();
  st.per_class.assign(dataset.classes.size(), 0);
  for (const Sample& s : dataset.samples) {
    ++st.per_origin[static_cast<std::size_t>(s.origin)];
    for (const Annotation& a : s.annotations) {
      ++st.num_annotations;
      if (a.class_id >= 0 && static_cast<std::size_t>(a.class_id) < st.per_class.size()) {
        ++st.per_class[static_cast<std::size_t>(a.class_id)];
      }
      const double size = std::sqrt(a.box.w() * a.box.h());
      const int bin = std::clamp(static_cast<int>(size * kBoxSizeBins), 0, kBoxSizeBins - 1);
      ++st.box_size_histogram[static_cast<std::size_t>(bin)];
    }
  }
  return st;
}

std::string format_stats(const Dataset& dataset, const DatasetStats& st) {
  std::ostringstream out;
  out << "samples=" << st.num_samples << "\n";
  out << "annotations=" << st.num_annotations << "\n";
  for (std::size_t c = 0; c < st.per_class.size(); ++c) {
    const std::string name = c < dataset.classes.size() ? dataset.classes[c] : std::to_string(c);
    out << "class." << name << "=" << st.per_class[c] << "\n";
  }
  for (Origin o : {Origin::kReal, Origin::kSynthetic, Origin::kAugmented}) {
    out << "origin." << to_string(o) << "=" << st.per_origin[static_cast<std::size_t>(o)] << "\n";
  }
  out << "box_size_histogram=";
  for (int b = 0; b < kBoxSizeBins; ++b) out << (b ? "," : "") << st.box_size_histogram[b];
  out << "\n";
  return out.str();
}

}  // namespace detmix
