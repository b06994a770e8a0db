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

#include <optional>

namespace detmix {

// Boxes whose visible area drops below this fraction of their original area
// are discarded after clipping, rotation or occlusion.
inline constexpr double kDefaultMinVisibleAreaFraction = 0.1;

// Rounds `x` to the nearest multiple of 2^-53. On that lattice `1 - x` is
// exact for every x in [0, 1], which makes mirror operations bit-exact
// involutions.
double snap_to_unit_lattice(double x);

// Axis-aligned box in normalized center format. Coordinates are snapped to
// the 2^-53 lattice on construction.
class BBox {
 public:
  BBox() = default;
  BBox(double cx, double cy, double w, double h);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }

  double x_min() const { return cx_ - w_ / 2; }
  double x_max() const { return cx_ + w_ / 2; }
  double y_min() const { return cy_ - h_ / 2; }
  double y_max() const { return cy_ + h_ / 2; }

  // Positive extent and inside the unit square, allowing `tolerance` of
  // overhang for label-file rounding noise.
  bool is_valid(double tolerance = 1e-9) const;

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double cx_ = 0.5;
  double cy_ = 0.5;
  double w_ = 1.0;
  double h_ = 1.0;
};

struct CanvasSize {
  int width = 1;
  int height = 1;

  friend bool operator==(const CanvasSize&, const CanvasSize&) = default;
};

// Corner box in pixel units.
struct PixelBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double area() const;
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

enum class TransformKind {
  kHorizontalFlip,
  kVerticalFlip,
  kRotate90Cw,
  kRotate180,
  kRotate270Cw,
  kRotateArbitrary,
};

struct GeomTransform {
  TransformKind kind = TransformKind::kHorizontalFlip;
  // Clockwise degrees in [0, 360); only used by kRotateArbitrary.
  double angle_deg = 0;

  static GeomTransform horizontal_flip() { return {TransformKind::kHorizontalFlip, 0}; }
  static GeomTransform vertical_flip() { return {TransformKind::kVerticalFlip, 0}; }
  static GeomTransform rotate_90cw() { return {TransformKind::kRotate90Cw, 0}; }
  static GeomTransform rotate_180() { return {TransformKind::kRotate180, 0}; }
  static GeomTransform rotate_270cw() { return {TransformKind::kRotate270Cw, 0}; }
  // Throws detmix::Error when the angle is outside [0, 360).
  static GeomTransform rotate(double angle_deg);

  bool is_rotation() const;
  friend bool operator==(const GeomTransform&, const GeomTransform&) = default;
};

const char* to_string(TransformKind kind);

double iou(const BBox& a, const BBox& b);
double iou(const PixelBox& a, const PixelBox& b);

PixelBox to_pixel(const BBox& b, CanvasSize canvas);
// Inverse of to_pixel. The result may extend outside the unit square when the
// pixel box extends outside the canvas.
BBox to_normalized(const PixelBox& p, CanvasSize canvas);

// Canvas dimensions after applying `t` (90 and 270 degree rotations swap).
CanvasSize transformed_canvas(CanvasSize canvas, const GeomTransform& t);

// Image of `b` under `t`. Flips and right-angle rotations are exact; an
// arbitrary rotation yields the axis-aligned hull of the rotated corners,
// clipped to the canvas. Returns nullopt when the clipped box is dropped.
std::optional<BBox> transform_box(const BBox& b, const GeomTransform& t, CanvasSize canvas,
                                  double min_visible_area_fraction = kDefaultMinVisibleAreaFraction);

// Intersects `b` with the unit square. Returns nullopt when the remaining area
// is zero or below `min_visible_area_fraction` of the original area.
std::optional<BBox> clip_box(const BBox& b,
                             double min_visible_area_fraction = kDefaultMinVisibleAreaFraction);

}  // namespace detmix
