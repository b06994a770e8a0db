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

#include "detmix/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "detmix/error.hpp"
#include "detmix/rng.hpp"

namespace detmix {
namespace {

void require_positive_size(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                std::to_string(height));
  }
}

Raster rotate_right_angle(const Raster& img, TransformKind kind) {
  const int w = img.width();
  const int h = img.height();
  const bool transpose = kind == TransformKind::kRotate90Cw || kind == TransformKind::kRotate270Cw;
  Raster out(transpose ? h : w, transpose ? w : h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int nx = x;
      int ny = y;
      switch (kind) {
        case TransformKind::kRotate90Cw: nx = h - 1 - y; ny = x; break;
        case TransformKind::kRotate180: nx = w - 1 - x; ny = h - 1 - y; break;
        case TransformKind::kRotate270Cw: nx = y; ny = w - 1 - x; break;
        default: break;
      }
      std::memcpy(out.pixel(nx, ny), img.pixel(x, y), Raster::kChannels);
    }
  }
  return out;
}

Raster rotate_bilinear(const Raster& img, double angle_deg, std::array<std::uint8_t, 3> fill) {
  const int w = img.width();
  const int h = img.height();
  Raster out(w, h);
  const double ox = w / 2.0;
  const double oy = h / 2.0;
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  auto tap = [&](int x, int y, int ch) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return fill[ch];
    return img.pixel(x, y)[ch];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse of the clockwise forward rotation, sampled at pixel centers.
      const double dx = x + 0.5 - ox;
      const double dy = y + 0.5 - oy;
      const double u = ox + dx * c + dy * s - 0.5;
      const double v = oy - dx * s + dy * c - 0.5;
      const double fx0 = std::floor(u);
      const double fy0 = std::floor(v);
      const double ax = u - fx0;
      const double ay = v - fy0;
      std::uint8_t* dst = out.pixel(x, y);
      if (fx0 < -2 || fy0 < -2 || fx0 > w + 1 || fy0 > h + 1) {
        std::memcpy(dst, fill.data(), 3);
        continue;
      }
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      for (int ch = 0; ch < 3; ++ch) {
        const double top = tap(x0, y0, ch) * (1 - ax) + tap(x0 + 1, y0, ch) * ax;
        const double bottom = tap(x0, y0 + 1, ch) * (1 - ax) + tap(x0 + 1, y0 + 1, ch) * ax;
        dst[ch] = quantize(top * (1 - ay) + bottom * ay);
      }
    }
  }
  return out;
}

}  // namespace

Raster::Raster(int width, int height, std::array<std::uint8_t, 3> fill)
    : width_(width), height_(height) {
  require_positive_size(width, height);
  data_.resize(static_cast<std::size_t>(width) * height * kChannels);
  for (std::size_t i = 0; i < data_.size(); i += kChannels) {
    std::memcpy(&data_[i], fill.data(), kChannels);
  }
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require_positive_size(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw Error("raster data holds " + std::to_string(data_.size()) + " samples, expected " +
                std::to_string(static_cast<std::size_t>(width) * height * kChannels));
  }
}

std::uint8_t quantize(double value) {
  const double r = std::floor(value + 0.5);
  if (r <= 0) return 0;
  if (r >= 255) return 255;
  return static_cast<std::uint8_t>(r);
}

Hsv rgb_to_hsv(Rgb pixel) {
  const double r = pixel.r;
  const double g = pixel.g;
  const double b = pixel.b;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;
  Hsv out;
  out.v = max / 255.0;
  out.s = max == 0 ? 0.0 : delta / max;
  if (delta == 0) {
    out.h = 0;
  } else if (max == r) {
    out.h = 60.0 * ((g - b) / delta);
    if (out.h < 0) out.h += 360.0;
  } else if (max == g) {
    out.h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    out.h = 60.0 * ((r - g) / delta + 4.0);
  }
  return out;
}

Rgb hsv_to_rgb(Hsv hsv) {
  const double c = hsv.v * hsv.s;
  const double hp = hsv.h / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  const double m = hsv.v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {quantize((r + m) * 255.0), quantize((g + m) * 255.0), quantize((b + m) * 255.0)};
}

Raster hsv_jitter(const Raster& img, const HsvGains& gains, RngStream& rng) {
  const double uh = rng.uniform(-1.0, 1.0);
  const double us = rng.uniform(-1.0, 1.0);
  const double uv = rng.uniform(-1.0, 1.0);
  return hsv_scale(img, {1 + uh * gains.h_gain, 1 + us * gains.s_gain, 1 + uv * gains.v_gain});
}

Raster hsv_scale(const Raster& img, const HsvFactors& factors) {
  if (factors.h == 1 && factors.s == 1 && factors.v == 1) return img;
  Raster out = img;
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); i += Raster::kChannels) {
    Hsv hsv = rgb_to_hsv({data[i], data[i + 1], data[i + 2]});
    double hue = hsv.h / 360.0 * factors.h;
    hue -= std::floor(hue);
    hsv.h = hue * 360.0;
    if (hsv.h >= 360.0) hsv.h = 0;
    hsv.s = std::clamp(hsv.s * factors.s, 0.0, 1.0);
    hsv.v = std::clamp(hsv.v * factors.v, 0.0, 1.0);
    const Rgb rgb = hsv_to_rgb(hsv);
    data[i] = rgb.r;
    data[i + 1] = rgb.g;
    data[i + 2] = rgb.b;
  }
  return out;
}

Raster flip_raster(const Raster& img, FlipAxis axis) {
  const int w = img.width();
  const int h = img.height();
  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    if (axis == FlipAxis::kVertical) {
      std::memcpy(out.pixel(0, h - 1 - y), img.pixel(0, y),
                  static_cast<std::size_t>(w) * Raster::kChannels);
      continue;
    }
    for (int x = 0; x < w; ++x) {
      std::memcpy(out.pixel(w - 1 - x, y), img.pixel(x, y), Raster::kChannels);
    }
  }
  return out;
}

Raster transform_raster(const Raster& img, const GeomTransform& t,
                        std::array<std::uint8_t, 3> fill) {
  switch (t.kind) {
    case TransformKind::kHorizontalFlip: return flip_raster(img, FlipAxis::kHorizontal);
    case TransformKind::kVerticalFlip: return flip_raster(img, FlipAxis::kVertical);
    default: return rotate_raster(img, t, fill);
  }
}

Raster rotate_raster(const Raster& img, const GeomTransform& rotation,
                     std::array<std::uint8_t, 3> fill) {
  switch (rotation.kind) {
    case TransformKind::kRotate90Cw:
    case TransformKind::kRotate180:
    case TransformKind::kRotate270Cw: return rotate_right_angle(img, rotation.kind);
    case TransformKind::kRotateArbitrary:
      if (rotation.angle_deg == 0) return img;
      return rotate_bilinear(img, rotation.angle_deg, fill);
    default: throw Error("rotate_raster expects a rotation transform");
  }
}

Raster blend(const Raster& a, const Raster& b, double lambda) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error("blend: dimension mismatch " + std::to_string(a.width()) + "x" +
                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()));
  }
  if (!(lambda >= 0 && lambda <= 1)) throw Error("blend: lambda must be in [0, 1]");
  // On the lattice both weights are exact complements, so swapping the
  // operands with 1 - lambda reproduces the same sums.
  const double wa = snap_to_unit_lattice(lambda);
  const double wb = 1.0 - wa;
  Raster out(a.width(), a.height());
  auto da = a.data();
  auto db = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = quantize(wa * da[i] + wb * db[i]);
  }
  return out;
}

Raster paste_patch(const Raster& dst, const Raster& src, const PixelRect& src_rect,
                   PixelPoint dst_origin) {
  if (src_rect.empty()) throw Error("paste_patch: empty source rectangle");
  if (src_rect.x < 0 || src_rect.y < 0 || src_rect.x + src_rect.width > src.width() ||
      src_rect.y + src_rect.height > src.height()) {
    throw Error("paste_patch: source rectangle exceeds source image");
  }
  Raster out = dst;
  const int x_begin = std::max(0, -dst_origin.x);
  const int x_end = std::min(src_rect.width, dst.width() - dst_origin.x);
  if (x_end <= x_begin) return out;
  for (int row = 0; row < src_rect.height; ++row) {
    const int dy = dst_origin.y + row;
    if (dy < 0 || dy >= dst.height()) continue;
    std::memcpy(out.pixel(dst_origin.x + x_begin, dy), src.pixel(src_rect.x + x_begin, src_rect.y + row),
                static_cast<std::size_t>(x_end - x_begin) * Raster::kChannels);
  }
  return out;
}

Raster resize_bilinear(const Raster& img, int width, int height) {
  if (width == img.width() && height == img.height()) return img;
  Raster out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double v = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(v);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ay = v - y0;
    for (int x = 0; x < width; ++x) {
      const double u = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(u);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double ax = u - x0;
      std::uint8_t* d = out.pixel(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        const double top = img.pixel(x0, y0)[ch] * (1 - ax) + img.pixel(x1, y0)[ch] * ax;
        const double bottom = img.pixel(x0, y1)[ch] * (1 - ax) + img.pixel(x1, y1)[ch] * ax;
        d[ch] = quantize(top * (1 - ay) + bottom * ay);
      }
    }
  }
  return out;
}

}  // namespace detmix
