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
#include <span>
#include <vector>

#include "detmix/geom.hpp"

namespace detmix {

class RngStream;

// Row-major 8-bit RGB image.
class Raster {
 public:
  static constexpr int kChannels = 3;

  Raster() = default;
  Raster(int width, int height, std::array<std::uint8_t, 3> fill = {0, 0, 0});
  // Throws detmix::Error when `data` does not hold width*height*3 samples.
  Raster(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  CanvasSize canvas() const { return {width_, height_}; }
  bool empty() const { return data_.empty(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  std::uint8_t* pixel(int x, int y) { return &data_[index(x, y)]; }
  const std::uint8_t* pixel(int x, int y) const { return &data_[index(x, y)]; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Hsv {
  double h = 0;  // degrees in [0, 360)
  double s = 0;  // [0, 1]
  double v = 0;  // [0, 1]
};

struct HsvGains {
  double h_gain = 0.015;
  double s_gain = 0.7;
  double v_gain = 0.4;
};

// Multiplicative factors applied to hue, saturation and value.
struct HsvFactors {
  double h = 1;
  double s = 1;
  double v = 1;
};

struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  bool empty() const { return width <= 0 || height <= 0; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct PixelPoint {
  int x = 0;
  int y = 0;
};

enum class FlipAxis { kHorizontal, kVertical };

inline constexpr std::array<std::uint8_t, 3> kDefaultFill = {114, 114, 114};

// Float to 8-bit with round-half-up and saturation.
std::uint8_t quantize(double value);

Hsv rgb_to_hsv(Rgb pixel);
Rgb hsv_to_rgb(Hsv hsv);

// Draws u_h, u_s, u_v uniformly in [-1, 1] and applies 1 + u * gain to the
// whole image.
Raster hsv_jitter(const Raster& img, const HsvGains& gains, RngStream& rng);
// Deterministic core of hsv_jitter. Identity factors return an exact copy.
Raster hsv_scale(const Raster& img, const HsvFactors& factors);

Raster flip_raster(const Raster& img, FlipAxis axis);
// Flips and right-angle rotations are exact pixel permutations. Arbitrary
// angles rotate clockwise about the center with bilinear sampling and keep
// the canvas size; uncovered pixels take `fill`.
Raster transform_raster(const Raster& img, const GeomTransform& t,
                        std::array<std::uint8_t, 3> fill = kDefaultFill);
Raster rotate_raster(const Raster& img, const GeomTransform& rotation,
                     std::array<std::uint8_t, 3> fill = kDefaultFill);

// round(lambda * a + (1 - lambda) * b) per sample. Throws on size mismatch.
Raster blend(const Raster& a, const Raster& b, double lambda);

// Copies `src_rect` of `src` to `dst_origin` in a copy of `dst`; the part that
// lands outside `dst` is dropped. Throws when `src_rect` is empty or exceeds
// `src`.
Raster paste_patch(const Raster& dst, const Raster& src, const PixelRect& src_rect,
                   PixelPoint dst_origin);

Raster resize_bilinear(const Raster& img, int width, int height);

}  // namespace detmix
