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

#include "detmix/toy.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "detmix/error.hpp"
#include "detmix/parallel.hpp"
#include "detmix/rng.hpp"

namespace detmix {
namespace {

constexpr int kBright = 220;
constexpr int kDark = 40;
constexpr int kObjectNoise = 10;
constexpr int kBackground = 114;
constexpr int kBackgroundNoise = 20;
constexpr int kOnThreshold = 160;
constexpr int kOffThreshold = 100;
constexpr int kGap = 2;

bool overlaps(const PixelRect& a, const PixelRect& b) {
  return a.x < b.x + b.width + kGap && b.x < a.x + a.width + kGap && a.y < b.y + b.height + kGap &&
         b.y < a.y + a.height + kGap;
}

int channel_value(RngStream& rng, int center, int spread) {
  return static_cast<int>(rng.uniform_int(center - spread, center + spread));
}

int class_at(const Raster& img, int x, int y, int num_classes) {
  const auto px = img.pixel(x, y);
  for (int c = 0; c < num_classes; ++c) {
    bool match = px[static_cast<std::size_t>(c)] >= kOnThreshold;
    for (int o = 0; o < 3 && match; ++o) {
      if (o != c && px[static_cast<std::size_t>(o)] > kOffThreshold) match = false;
    }
    if (match) return c;
  }
  return -1;
}

std::vector<Detection> detect_components(const Sample& sample) {
  const Raster& img = sample.raster;
  const int w = img.width();
  const int h = img.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) label[static_cast<std::size_t>(y) * w + x] = class_at(img, x, y, 3);
  }
  std::vector<char> seen(label.size(), 0);
  std::vector<Detection> out;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (label[i] < 0 || seen[i]) continue;
      const int cls = label[i];
      int x0 = x, x1 = x, y0 = y, y1 = y;
      std::size_t pixels = 0;
      stack.assign(1, {x, y});
      seen[i] = 1;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++pixels;
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        constexpr std::array<std::pair<int, int>, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        for (const auto& [dx, dy] : kSteps) {
          const int nx = cx + dx;
          const int ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
          if (!seen[j] && label[j] == cls) {
            seen[j] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
      const double area = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
      Detection d;
      d.image_id = sample.image_id;
      d.class_id = cls;
      d.box = to_normalized(PixelBox{static_cast<double>(x0), static_cast<double>(y0),
                                     static_cast<double>(x1 + 1), static_cast<double>(y1 + 1)},
                            img.canvas());
      d.confidence = 0.5 + 0.5 * static_cast<double>(pixels) / area;
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace

Dataset make_toy_scenes(std::size_t count, const ToySceneOptions& o, std::uint64_t seed,
                        const std::vector<std::string>& classes) {
  if (o.num_classes < 1 || o.num_classes > 3 ||
      static_cast<std::size_t>(o.num_classes) > classes.size()) {
    throw Error("toy scenes support 1 to 3 classes and need a matching class table");
  }
  if (o.min_side < 2 || o.max_side < o.min_side || o.max_side > std::min(o.width, o.height) ||
      o.min_objects < 0 || o.max_objects < o.min_objects) {
    throw Error("toy scene options out of range");
  }
  Dataset ds{"toy", classes, std::vector<Sample>(count)};
  for (std::size_t n = 0; n < count; ++n) {
    char num[32];
    std::snprintf(num, sizeof num, "%05zu", n);
    const std::string id = o.id_prefix + num;
    RngStream rng(seed, id, 0);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(o.width) * o.height * 3);
    for (auto& v : data) v = static_cast<std::uint8_t>(channel_value(rng, kBackground, kBackgroundNoise));
    Raster img(o.width, o.height, std::move(data));

    Sample& s = ds.samples[n];
    s.image_id = id;
    const int wanted = static_cast<int>(rng.uniform_int(o.min_objects, o.max_objects));
    std::vector<PixelRect> placed;
    for (int attempt = 0; attempt < 200 && static_cast<int>(placed.size()) < wanted; ++attempt) {
      const int rw = static_cast<int>(rng.uniform_int(o.min_side, o.max_side));
      const int rh = static_cast<int>(rng.uniform_int(o.min_side, o.max_side));
      const PixelRect r{static_cast<int>(rng.uniform_int(0, o.width - rw)),
                        static_cast<int>(rng.uniform_int(0, o.height - rh)), rw, rh};
      if (std::any_of(placed.begin(), placed.end(), [&](const PixelRect& p) { return overlaps(p, r); })) {
        continue;
      }
      placed.push_back(r);
      const int cls = static_cast<int>(rng.uniform_int(0, o.num_classes - 1));
      for (int y = r.y; y < r.y + r.height; ++y) {
        for (int x = r.x; x < r.x + r.width; ++x) {
          std::uint8_t* px = img.pixel(x, y);
          for (int c = 0; c < 3; ++c) {
            px[c] = static_cast<std::uint8_t>(channel_value(rng, c == cls ? kBright : kDark, kObjectNoise));
          }
        }
      }
      s.annotations.push_back(
          {cls, to_normalized(PixelBox{static_cast<double>(r.x), static_cast<double>(r.y),
                                       static_cast<double>(r.x + r.width),
                                       static_cast<double>(r.y + r.height)},
                              img.canvas())});
    }
    s.raster = std::move(img);
  }
  return ds;
}

std::vector<Detection> stub_detect(const Sample& sample, StubMode mode) {
  if (mode == StubMode::kEcho) {
    std::vector<Detection> out;
    for (const Annotation& a : sample.annotations) {
      out.push_back({sample.image_id, a.class_id, a.box, 1.0});
    }
    return out;
  }
  std::vector<Detection> out = detect_components(sample);
  if (mode == StubMode::kJitter) {
    for (Detection& d : out) {
      // Shift toward the image center so the box stays inside the frame.
      const double shift = (d.box.cx() < 0.5 ? 0.5 : -0.5) * d.box.w();
      BBox moved(d.box.cx() + shift, d.box.cy(), d.box.w(), d.box.h());
      if (auto clipped = clip_box(moved, 0.0)) d.box = *clipped;
    }
  }
  return out;
}

std::vector<Detection> stub_detect(const Dataset& dataset, StubMode mode, int jobs) {
  std::vector<std::vector<Detection>> per_image(dataset.samples.size());
  parallel_for(dataset.samples.size(), jobs,
               [&](std::size_t i) { per_image[i] = stub_detect(dataset.samples[i], mode); });
  std::vector<Detection> out;
  for (auto& v : per_image) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace detmix
