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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "detmix/error.hpp"
#include "detmix/geom.hpp"
#include "oracle.hpp"
#include "support.hpp"

namespace detmix {
namespace {

using testing::random_box;
using testing::uniform;

// Pixel-unit area as the product of pixel width and pixel height.
double pixel_area(const BBox& b, CanvasSize c) { return (b.w() * c.width) * (b.h() * c.height); }

// Brute-force image of a box under a right-angle rotation: rotate the four
// pixel corners and take their extent.
BBox rotate_corners_oracle(const BBox& b, CanvasSize canvas, int quarter_turns_cw) {
  const PixelBox p = to_pixel(b, canvas);
  std::vector<std::pair<double, double>> pts = {
      {p.x_min, p.y_min}, {p.x_max, p.y_min}, {p.x_max, p.y_max}, {p.x_min, p.y_max}};
  CanvasSize c = canvas;
  for (int q = 0; q < quarter_turns_cw; ++q) {
    for (auto& [x, y] : pts) {
      const double nx = c.height - y;
      const double ny = x;
      x = nx;
      y = ny;
    }
    c = {c.height, c.width};
  }
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (auto [x, y] : pts) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  return BBox((x0 + x1) / 2 / c.width, (y0 + y1) / 2 / c.height, (x1 - x0) / c.width,
              (y1 - y0) / c.height);
}

void expect_box_near(const BBox& a, const BBox& b, double tol) {
  EXPECT_NEAR(a.cx(), b.cx(), tol);
  EXPECT_NEAR(a.cy(), b.cy(), tol);
  EXPECT_NEAR(a.w(), b.w(), tol);
  EXPECT_NEAR(a.h(), b.h(), tol);
}

TEST(Iou, IdenticalBoxesGiveOne) {
  EXPECT_EQ(iou(BBox(0.3, 0.4, 0.2, 0.1), BBox(0.3, 0.4, 0.2, 0.1)), 1.0);
}

TEST(Iou, DisjointBoxesGiveZero) {
  EXPECT_EQ(iou(BBox(0.1, 0.1, 0.1, 0.1), BBox(0.9, 0.9, 0.1, 0.1)), 0.0);
}

TEST(Iou, PixelBoxesOverlappingByOneThird) {
  EXPECT_DOUBLE_EQ(iou(PixelBox{0, 0, 2, 2}, PixelBox{1, 0, 3, 2}), 1.0 / 3.0);
}

TEST(Iou, TouchingBoxesGiveZero) {
  EXPECT_EQ(iou(PixelBox{0, 0, 1, 1}, PixelBox{1, 0, 2, 1}), 0.0);
  EXPECT_EQ(iou(BBox(0.25, 0.5, 0.5, 0.5), BBox(0.75, 0.5, 0.5, 0.5)), 0.0);
}

TEST(Iou, SymmetricSelfExactAndMatchesExactArithmetic) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box(rng);
    const BBox b = i % 3 ? testing::jitter_box(rng, a, 0.4) : random_box(rng);
    EXPECT_EQ(iou(a, b), iou(b, a));
    EXPECT_EQ(iou(a, a), 1.0);
    const double v = iou(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, oracle::to_double(oracle::exact_iou(a, b)), 1e-15);
  }
}

TEST(ToPixel, FullCanvas) {
  EXPECT_EQ(to_pixel(BBox(0.5, 0.5, 1.0, 1.0), {100, 100}), (PixelBox{0, 0, 100, 100}));
}

TEST(ToPixel, NonSquareCanvas) {
  EXPECT_EQ(to_pixel(BBox(0.25, 0.5, 0.5, 0.5), {200, 100}), (PixelBox{0, 25, 100, 75}));
}

TEST(ToPixel, RoundTripThroughNormalized) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const BBox b = random_box(rng);
    const CanvasSize c{testing::uniform_int(rng, 1, 4000), testing::uniform_int(rng, 1, 4000)};
    expect_box_near(to_normalized(to_pixel(b, c), c), b, 1e-9);
  }
}

TEST(TransformBox, HorizontalFlipMirrorsCenter) {
  const auto out = transform_box(BBox(0.25, 0.5, 0.2, 0.2), GeomTransform::horizontal_flip(), {640, 480});
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, BBox(0.75, 0.5, 0.2, 0.2));
}

TEST(TransformBox, Rotate180IsPointSymmetry) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const BBox b = random_box(rng);
    const auto out = transform_box(b, GeomTransform::rotate_180(), {300, 200});
    ASSERT_TRUE(out);
    EXPECT_EQ(*out, BBox(1 - b.cx(), 1 - b.cy(), b.w(), b.h()));
  }
}

TEST(TransformBox, Rotate90MatchesCornerRotation) {
  const BBox b(0.25, 0.5, 0.2, 0.1);
  const CanvasSize canvas{200, 100};
  const auto out = transform_box(b, GeomTransform::rotate_90cw(), canvas);
  ASSERT_TRUE(out);
  expect_box_near(*out, rotate_corners_oracle(b, canvas, 1), 1e-12);

  std::mt19937_64 rng(14);
  for (int i = 0; i < 500; ++i) {
    const BBox r = random_box(rng);
    const CanvasSize c{testing::uniform_int(rng, 1, 2000), testing::uniform_int(rng, 1, 2000)};
    expect_box_near(*transform_box(r, GeomTransform::rotate_90cw(), c), rotate_corners_oracle(r, c, 1), 1e-12);
    expect_box_near(*transform_box(r, GeomTransform::rotate_180(), c), rotate_corners_oracle(r, c, 2), 1e-12);
    expect_box_near(*transform_box(r, GeomTransform::rotate_270cw(), c), rotate_corners_oracle(r, c, 3), 1e-12);
  }
}

TEST(TransformBox, FlipsAreBitExactInvolutions) {
  std::mt19937_64 rng(15);
  const CanvasSize c{640, 480};
  for (int i = 0; i < 1000; ++i) {
    const BBox b = random_box(rng);
    for (const auto t : {GeomTransform::horizontal_flip(), GeomTransform::vertical_flip(),
                         GeomTransform::rotate_180()}) {
      EXPECT_EQ(*transform_box(*transform_box(b, t, c), t, c), b);
    }
  }
}

TEST(TransformBox, FourQuarterTurnsAreIdentity) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 1000; ++i) {
    const BBox b = random_box(rng);
    CanvasSize c{testing::uniform_int(rng, 1, 2000), testing::uniform_int(rng, 1, 2000)};
    const CanvasSize start = c;
    BBox cur = b;
    for (int q = 0; q < 4; ++q) {
      cur = *transform_box(cur, GeomTransform::rotate_90cw(), c);
      c = transformed_canvas(c, GeomTransform::rotate_90cw());
    }
    EXPECT_EQ(cur, b);
    EXPECT_EQ(c, start);
    BBox back = *transform_box(*transform_box(b, GeomTransform::rotate_90cw(), c),
                               GeomTransform::rotate_270cw(), transformed_canvas(c, GeomTransform::rotate_90cw()));
    EXPECT_EQ(back, b);
  }
}

TEST(TransformBox, RightAnglesPreservePixelArea) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const BBox b = random_box(rng);
    const CanvasSize c{testing::uniform_int(rng, 1, 2000), testing::uniform_int(rng, 1, 2000)};
    for (const auto t : {GeomTransform::horizontal_flip(), GeomTransform::vertical_flip(),
                         GeomTransform::rotate_90cw(), GeomTransform::rotate_180(),
                         GeomTransform::rotate_270cw()}) {
      EXPECT_EQ(pixel_area(*transform_box(b, t, c), transformed_canvas(c, t)), pixel_area(b, c));
    }
  }
}

TEST(TransformBox, ArbitraryRotationIsClippedHullOfRotatedCorners) {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 500; ++i) {
    const BBox b = random_box(rng);
    const CanvasSize c{testing::uniform_int(rng, 10, 1000), testing::uniform_int(rng, 10, 1000)};
    const double angle = uniform(rng, 0, 360);
    const double rad = angle * std::numbers::pi / 180;
    const PixelBox p = to_pixel(b, c);
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (double x : {p.x_min, p.x_max}) {
      for (double y : {p.y_min, p.y_max}) {
        // Clockwise on screen, where y grows downward.
        const double dx = x - c.width / 2.0, dy = y - c.height / 2.0;
        const double rx = c.width / 2.0 + dx * std::cos(rad) - dy * std::sin(rad);
        const double ry = c.height / 2.0 + dx * std::sin(rad) + dy * std::cos(rad);
        x0 = std::min(x0, rx);
        x1 = std::max(x1, rx);
        y0 = std::min(y0, ry);
        y1 = std::max(y1, ry);
      }
    }
    const double full = (x1 - x0) * (y1 - y0);
    const double cx0 = std::max(x0, 0.0), cx1 = std::min(x1, double(c.width));
    const double cy0 = std::max(y0, 0.0), cy1 = std::min(y1, double(c.height));
    const auto out = transform_box(b, GeomTransform::rotate(angle), c, 0.1);
    if (cx1 <= cx0 || cy1 <= cy0 || (cx1 - cx0) * (cy1 - cy0) < 0.1 * full * (1 - 1e-9)) {
      EXPECT_FALSE(out && (cx1 - cx0) * (cy1 - cy0) < 0.1 * full * (1 - 1e-6));
      continue;
    }
    ASSERT_TRUE(out);
    expect_box_near(*out, BBox((cx0 + cx1) / 2 / c.width, (cy0 + cy1) / 2 / c.height,
                               (cx1 - cx0) / c.width, (cy1 - cy0) / c.height),
                    1e-9);
    EXPECT_TRUE(out->is_valid(0.0));
  }
}

TEST(TransformBox, RotationNinetyDegreesArbitraryAgreesWithExactQuarterTurnOnSquareCanvas) {
  const BBox b(0.3, 0.4, 0.2, 0.1);
  const auto exact = transform_box(b, GeomTransform::rotate_90cw(), {100, 100});
  const auto approx = transform_box(b, GeomTransform::rotate(90), {100, 100});
  ASSERT_TRUE(exact && approx);
  expect_box_near(*approx, *exact, 1e-12);
}

TEST(GeomTransform, RotationAngleMustBeInRange) {
  EXPECT_THROW(GeomTransform::rotate(360), Error);
  EXPECT_THROW(GeomTransform::rotate(-0.5), Error);
  EXPECT_THROW(GeomTransform::rotate(std::nan("")), Error);
  EXPECT_NO_THROW(GeomTransform::rotate(0));
  EXPECT_NO_THROW(GeomTransform::rotate(359.9));
}

TEST(ClipBox, InsideBoxUnchanged) {
  const BBox b(0.5, 0.5, 0.3, 0.2);
  EXPECT_EQ(clip_box(b, 0.1), b);
}

TEST(ClipBox, OutsideBoxDropped) {
  EXPECT_FALSE(clip_box(BBox(1.5, 0.5, 0.2, 0.2), 0.1));
  EXPECT_FALSE(clip_box(BBox(-0.5, -0.5, 0.2, 0.2), 0.0));
}

TEST(ClipBox, HalfOutsideKeepsHalfWidthAndMatchesRasterizedArea) {
  const BBox b(1.0, 0.5, 0.4, 0.2);
  const auto out = clip_box(b, 0.25);
  ASSERT_TRUE(out);
  EXPECT_DOUBLE_EQ(out->w(), 0.2);
  EXPECT_DOUBLE_EQ(out->h(), 0.2);
  EXPECT_DOUBLE_EQ(out->cx(), 0.9);

  // Count pixel centers of a 1000x1000 grid covered by the original box and
  // lying inside the unit square.
  const int n = 1000;
  long long covered = 0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double px = (x + 0.5) / n;
      const double py = (y + 0.5) / n;
      if (px >= b.x_min() && px < b.x_max() && py >= b.y_min() && py < b.y_max()) ++covered;
    }
  }
  EXPECT_NEAR(out->w() * out->h(), static_cast<double>(covered) / (n * n), 2.0 / n);
}

TEST(ClipBox, ThresholdDecidesSurvival) {
  // A quarter of the box stays visible.
  const BBox b(1.0, 1.0, 0.2, 0.2);
  EXPECT_TRUE(clip_box(b, 0.25));
  EXPECT_FALSE(clip_box(b, 0.26));
}

TEST(ClipBox, NeverGrowsAndStaysInside) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 2000; ++i) {
    const double w = uniform(rng, 0.01, 1.0);
    const double h = uniform(rng, 0.01, 1.0);
    const BBox b(uniform(rng, -0.5, 1.5), uniform(rng, -0.5, 1.5), w, h);
    const auto out = clip_box(b, uniform(rng, 0.0, 0.5));
    if (!out) continue;
    EXPECT_LE(out->w() * out->h(), b.w() * b.h() * (1 + 1e-12));
    EXPECT_TRUE(out->is_valid(0.0));
  }
}

TEST(BBox, ValidityRequiresPositiveExtentInsideUnitSquare) {
  EXPECT_TRUE(BBox(0.5, 0.5, 1.0, 1.0).is_valid());
  EXPECT_FALSE(BBox(0.5, 0.5, 0.0, 0.2).is_valid());
  EXPECT_FALSE(BBox(0.95, 0.5, 0.2, 0.2).is_valid());
}

}  // namespace
}  // namespace detmix
