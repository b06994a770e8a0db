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

#include "detmix/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "detmix/error.hpp"

namespace detmix {
namespace {

constexpr double kLattice = 9007199254740992.0;  // 2^53

double corner_iou(double ax0, double ay0, double ax1, double ay1, double bx0, double by0,
                  double bx1, double by1) {
  const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double ih = std::min(ay1, by1) - std::max(ay0, by0);
  // Touching or disjoint boxes share no interior.
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (ax1 - ax0) * (ay1 - ay0);
  const double area_b = (bx1 - bx0) * (by1 - by0);
  const double uni = area_a + area_b - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace

double snap_to_unit_lattice(double x) { return std::nearbyint(x * kLattice) / kLattice; }

BBox::BBox(double cx, double cy, double w, double h)
    : cx_(snap_to_unit_lattice(cx)),
      cy_(snap_to_unit_lattice(cy)),
      w_(snap_to_unit_lattice(w)),
      h_(snap_to_unit_lattice(h)) {}

bool BBox::is_valid(double tolerance) const {
  return w_ > 0 && h_ > 0 && x_min() >= -tolerance && x_max() <= 1 + tolerance &&
         y_min() >= -tolerance && y_max() <= 1 + tolerance;
}

double PixelBox::area() const {
  return std::max(0.0, x_max - x_min) * std::max(0.0, y_max - y_min);
}

GeomTransform GeomTransform::rotate(double angle_deg) {
  if (!(angle_deg >= 0 && angle_deg < 360)) {
    throw Error("rotation angle must be in [0, 360), got " + std::to_string(angle_deg));
  }
  return {TransformKind::kRotateArbitrary, angle_deg};
}

bool GeomTransform::is_rotation() const {
  return kind != TransformKind::kHorizontalFlip && kind != TransformKind::kVerticalFlip;
}

const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kHorizontalFlip: return "hflip";
    case TransformKind::kVerticalFlip: return "vflip";
    case TransformKind::kRotate90Cw: return "rot90cw";
    case TransformKind::kRotate180: return "rot180";
    case TransformKind::kRotate270Cw: return "rot270cw";
    case TransformKind::kRotateArbitrary: return "rotate";
  }
  return "?";
}

double iou(const BBox& a, const BBox& b) {
  return corner_iou(a.x_min(), a.y_min(), a.x_max(), a.y_max(), b.x_min(), b.y_min(), b.x_max(),
                    b.y_max());
}

double iou(const PixelBox& a, const PixelBox& b) {
  return corner_iou(a.x_min, a.y_min, a.x_max, a.y_max, b.x_min, b.y_min, b.x_max, b.y_max);
}

PixelBox to_pixel(const BBox& b, CanvasSize canvas) {
  const double w = canvas.width;
  const double h = canvas.height;
  return {b.x_min() * w, b.y_min() * h, b.x_max() * w, b.y_max() * h};
}

BBox to_normalized(const PixelBox& p, CanvasSize canvas) {
  const double w = canvas.width;
  const double h = canvas.height;
  return BBox((p.x_min + p.x_max) / 2 / w, (p.y_min + p.y_max) / 2 / h, (p.x_max - p.x_min) / w,
              (p.y_max - p.y_min) / h);
}

CanvasSize transformed_canvas(CanvasSize canvas, const GeomTransform& t) {
  if (t.kind == TransformKind::kRotate90Cw || t.kind == TransformKind::kRotate270Cw) {
    return {canvas.height, canvas.width};
  }
  return canvas;
}

std::optional<BBox> transform_box(const BBox& b, const GeomTransform& t, CanvasSize canvas,
                                  double min_visible_area_fraction) {
  switch (t.kind) {
    case TransformKind::kHorizontalFlip: return BBox(1 - b.cx(), b.cy(), b.w(), b.h());
    case TransformKind::kVerticalFlip: return BBox(b.cx(), 1 - b.cy(), b.w(), b.h());
    case TransformKind::kRotate180: return BBox(1 - b.cx(), 1 - b.cy(), b.w(), b.h());
    // (x, y) -> (H - y, x) in pixels; normalized by the transposed canvas.
    case TransformKind::kRotate90Cw: return BBox(1 - b.cy(), b.cx(), b.h(), b.w());
    // (x, y) -> (y, W - x).
    case TransformKind::kRotate270Cw: return BBox(b.cy(), 1 - b.cx(), b.h(), b.w());
    case TransformKind::kRotateArbitrary: break;
  }

  const PixelBox p = to_pixel(b, canvas);
  const double ox = canvas.width / 2.0;
  const double oy = canvas.height / 2.0;
  const double rad = t.angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const std::array<std::array<double, 2>, 4> corners{{
      {p.x_min, p.y_min}, {p.x_max, p.y_min}, {p.x_max, p.y_max}, {p.x_min, p.y_max}}};
  PixelBox hull{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const auto& [x, y] : corners) {
    const double dx = x - ox;
    const double dy = y - oy;
    const double rx = ox + dx * c - dy * s;
    const double ry = oy + dx * s + dy * c;
    hull.x_min = std::min(hull.x_min, rx);
    hull.y_min = std::min(hull.y_min, ry);
    hull.x_max = std::max(hull.x_max, rx);
    hull.y_max = std::max(hull.y_max, ry);
  }
  return clip_box(to_normalized(hull, canvas), min_visible_area_fraction);
}

std::optional<BBox> clip_box(const BBox& b, double min_visible_area_fraction) {
  if (b.is_valid(0.0)) return b;
  const double x0 = std::max(0.0, b.x_min());
  const double y0 = std::max(0.0, b.y_min());
  const double x1 = std::min(1.0, b.x_max());
  const double y1 = std::min(1.0, b.y_max());
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  const double original = b.w() * b.h();
  const double kept = (x1 - x0) * (y1 - y0);
  if (original <= 0 || kept < min_visible_area_fraction * original) return std::nullopt;
  // Edges are moved inward onto the lattice, with an even lattice width so
  // that the center is representable as well.
  const auto inward = [](double lo, double hi, double& center, double& size) {
    const double k_lo = std::ceil(lo * kLattice);
    double k_hi = std::floor(hi * kLattice);
    if (std::fmod(k_hi - k_lo, 2.0) != 0) k_hi -= 1;
    center = (k_lo + k_hi) / 2 / kLattice;
    size = (k_hi - k_lo) / kLattice;
  };
  double cx, cy, w, h;
  inward(x0, x1, cx, w);
  inward(y0, y1, cy, h);
  const BBox clipped(cx, cy, w, h);
  if (!clipped.is_valid(0.0)) return std::nullopt;
  return clipped;
}

}  // namespace detmix
