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

// Random instance generators and filesystem helpers shared by the tests.

#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "detmix/metrics.hpp"
#include "detmix/sample.hpp"

namespace detmix::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline BBox random_box(std::mt19937_64& rng, double min_side = 0.02, double max_side = 0.5) {
  const double w = uniform(rng, min_side, max_side);
  const double h = uniform(rng, min_side, max_side);
  return BBox(uniform(rng, w / 2, 1 - w / 2), uniform(rng, h / 2, 1 - h / 2), w, h);
}

// A box near `b`: shifted and rescaled by up to `amount` of its size.
inline BBox jitter_box(std::mt19937_64& rng, const BBox& b, double amount) {
  double w = b.w() * (1 + uniform(rng, -amount, amount));
  double h = b.h() * (1 + uniform(rng, -amount, amount));
  w = std::clamp(w, 0.01, 1.0);
  h = std::clamp(h, 0.01, 1.0);
  double cx = b.cx() + b.w() * uniform(rng, -amount, amount);
  double cy = b.cy() + b.h() * uniform(rng, -amount, amount);
  cx = std::clamp(cx, w / 2, 1 - w / 2);
  cy = std::clamp(cy, h / 2, 1 - h / 2);
  return BBox(cx, cy, w, h);
}

struct Instance {
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
};

// Up to `max_images` images with up to `max_boxes` ground-truth boxes each.
// Detections are jittered copies of ground truth plus stray boxes; half the
// instances draw confidences from a coarse grid so that ties occur.
inline Instance random_instance(std::mt19937_64& rng, int max_images = 5, int max_boxes = 6,
                                int num_classes = 3) {
  Instance inst;
  const int images = uniform_int(rng, 1, max_images);
  const bool coarse = uniform_int(rng, 0, 1) == 1;
  auto confidence = [&] {
    return coarse ? uniform_int(rng, 1, 10) / 10.0 : uniform(rng, 0.0, 1.0);
  };
  for (int i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    const int boxes = uniform_int(rng, 0, max_boxes);
    for (int b = 0; b < boxes; ++b) {
      const GroundTruth g{id, uniform_int(rng, 0, num_classes - 1), random_box(rng)};
      inst.gts.push_back(g);
      if (uniform(rng, 0, 1) < 0.75) {
        inst.dets.push_back({id, g.class_id, jitter_box(rng, g.box, 0.3), confidence()});
      }
      if (uniform(rng, 0, 1) < 0.2) {
        inst.dets.push_back({id, g.class_id, jitter_box(rng, g.box, 0.15), confidence()});
      }
    }
    const int strays = uniform_int(rng, 0, 2);
    for (int s = 0; s < strays; ++s) {
      inst.dets.push_back({id, uniform_int(rng, 0, num_classes - 1), random_box(rng), confidence()});
    }
  }
  std::shuffle(inst.dets.begin(), inst.dets.end(), rng);
  return inst;
}

// Raster of one solid color.
inline Raster filled(int width, int height, std::array<std::uint8_t, 3> rgb) {
  return Raster(width, height, rgb);
}

inline Raster random_raster(std::mt19937_64& rng, int width, int height) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * 3);
  for (auto& v : data) v = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
  return Raster(width, height, std::move(data));
}

inline Sample random_sample(std::mt19937_64& rng, const std::string& id, int width, int height,
                            int max_boxes = 4, int num_classes = 3) {
  Sample s;
  s.image_id = id;
  s.raster = random_raster(rng, width, height);
  const int n = uniform_int(rng, 0, max_boxes);
  for (int i = 0; i < n; ++i) {
    s.annotations.push_back({uniform_int(rng, 0, num_classes - 1), random_box(rng, 0.1, 0.6)});
  }
  return s;
}

inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, const std::string& prefix,
                              Origin origin = Origin::kReal, int width = 24, int height = 16) {
  Dataset ds{prefix, {"sugar_beet", "dicot", "monocot"}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    ds.samples.push_back(random_sample(rng, prefix + std::to_string(i), width, height));
    ds.samples.back().origin = origin;
  }
  return ds;
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("detmix_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Relative path -> file contents for every regular file below `root`.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
  }
  return out;
}

}  // namespace detmix::testing
