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

#include <random>
#include <set>

#include "detmix/augment.hpp"
#include "detmix/error.hpp"
#include "support.hpp"

namespace detmix {
namespace {

using testing::random_raster;
using testing::random_sample;
using testing::uniform_int;

AugmentationPolicy all_off() {
  AugmentationPolicy p;
  p.p_copy_paste = p.p_mixup = p.p_hsv = p.p_flip_rot = 0;
  return p;
}

// Box whose corners fall on pixel boundaries of `canvas`.
BBox grid_box(int x0, int y0, int x1, int y1, CanvasSize canvas) {
  return to_normalized(PixelBox{double(x0), double(y0), double(x1), double(y1)}, canvas);
}

BBox random_grid_box(std::mt19937_64& rng, CanvasSize c) {
  const int w = uniform_int(rng, 1, c.width / 2);
  const int h = uniform_int(rng, 1, c.height / 2);
  const int x = uniform_int(rng, 0, c.width - w);
  const int y = uniform_int(rng, 0, c.height - h);
  return grid_box(x, y, x + w, y + h, c);
}

Sample grid_sample(std::mt19937_64& rng, const std::string& id, CanvasSize c, int boxes) {
  Sample s;
  s.image_id = id;
  s.raster = random_raster(rng, c.width, c.height);
  for (int i = 0; i < boxes; ++i) s.annotations.push_back({uniform_int(rng, 0, 2), random_grid_box(rng, c)});
  return s;
}

TEST(ApplyHsv, ProbabilityZeroIsIdentity) {
  std::mt19937_64 rng(41);
  const Sample s = random_sample(rng, "a", 12, 8);
  AugmentationPolicy p = all_off();
  RngStream stream(1, "a", 0);
  EXPECT_EQ(apply_hsv(s, p, stream), s);
}

TEST(ApplyHsv, ZeroGainsKeepPixelsAndLabels) {
  std::mt19937_64 rng(42);
  const Sample s = random_sample(rng, "a", 12, 8);
  AugmentationPolicy p = all_off();
  p.p_hsv = 1;
  p.hsv_gains = {0, 0, 0};
  RngStream stream(1, "a", 0);
  EXPECT_EQ(apply_hsv(s, p, stream), s);
}

TEST(ApplyHsv, DeterministicAndLabelPreserving) {
  std::mt19937_64 rng(43);
  const Sample s = random_sample(rng, "a", 12, 8);
  AugmentationPolicy p = all_off();
  p.p_hsv = 1;
  RngStream a(1, "a", 0), b(1, "a", 0);
  const Sample x = apply_hsv(s, p, a);
  EXPECT_EQ(x, apply_hsv(s, p, b));
  EXPECT_EQ(x.annotations, s.annotations);
}

TEST(ApplyFlipRotate, ProbabilityZeroIsIdentity) {
  std::mt19937_64 rng(44);
  const Sample s = random_sample(rng, "a", 12, 8);
  RngStream stream(1, "a", 0);
  EXPECT_EQ(apply_flip_rotate(s, all_off(), stream), s);
}

TEST(FlipRotateWith, HorizontalFlipMovesBoxAndMirrorsPixels) {
  std::mt19937_64 rng(45);
  Sample s;
  s.image_id = "a";
  s.raster = random_raster(rng, 20, 10);
  s.annotations = {{1, BBox(0.2, 0.5, 0.2, 0.4)}};
  const Sample out = flip_rotate_with(s, GeomTransform::horizontal_flip());
  ASSERT_EQ(out.annotations.size(), 1u);
  EXPECT_EQ(out.annotations[0].box, BBox(0.8, 0.5, 0.2, 0.4));
  EXPECT_EQ(out.annotations[0].class_id, 1);
  EXPECT_EQ(out.raster, flip_raster(s.raster, FlipAxis::kHorizontal));
}

TEST(FlipRotateWith, PixelsInsideFlippedBoxAreMirroredOriginals) {
  std::mt19937_64 rng(46);
  const CanvasSize c{32, 24};
  for (int i = 0; i < 100; ++i) {
    const Sample s = grid_sample(rng, "a", c, 3);
    const Sample out = flip_rotate_with(s, GeomTransform::horizontal_flip());
    ASSERT_EQ(out.annotations.size(), s.annotations.size());
    for (std::size_t k = 0; k < s.annotations.size(); ++k) {
      const PixelBox src = to_pixel(s.annotations[k].box, c);
      const PixelBox dst = to_pixel(out.annotations[k].box, c);
      const int x0 = static_cast<int>(std::lround(src.x_min));
      const int x1 = static_cast<int>(std::lround(src.x_max));
      const int y0 = static_cast<int>(std::lround(src.y_min));
      const int y1 = static_cast<int>(std::lround(src.y_max));
      ASSERT_EQ(std::lround(dst.x_min), c.width - x1);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const auto* a = s.raster.pixel(x, y);
          const auto* b = out.raster.pixel(c.width - 1 - x, y);
          ASSERT_TRUE(std::equal(a, a + 3, b));
        }
      }
    }
  }
}

TEST(FlipRotateWith, QuarterTurnLabelsFollowCornerRotation) {
  std::mt19937_64 rng(47);
  const CanvasSize c{200, 100};
  for (int i = 0; i < 100; ++i) {
    const Sample s = random_sample(rng, "a", c.width, c.height);
    const Sample out = flip_rotate_with(s, GeomTransform::rotate_90cw());
    EXPECT_EQ(out.raster.width(), c.height);
    EXPECT_EQ(out.raster.height(), c.width);
    ASSERT_EQ(out.annotations.size(), s.annotations.size());
    for (std::size_t k = 0; k < s.annotations.size(); ++k) {
      const PixelBox p = to_pixel(s.annotations[k].box, c);
      // (x, y) -> (H - y, x) on the corners.
      const BBox expected((c.height - (p.y_min + p.y_max) / 2) / c.height, ((p.x_min + p.x_max) / 2) / c.width,
                          (p.y_max - p.y_min) / c.height, (p.x_max - p.x_min) / c.width);
      EXPECT_NEAR(out.annotations[k].box.cx(), expected.cx(), 1e-12);
      EXPECT_NEAR(out.annotations[k].box.cy(), expected.cy(), 1e-12);
      EXPECT_NEAR(out.annotations[k].box.w(), expected.w(), 1e-12);
      EXPECT_NEAR(out.annotations[k].box.h(), expected.h(), 1e-12);
      EXPECT_EQ(out.annotations[k].class_id, s.annotations[k].class_id);
    }
  }
}

TEST(FlipRotateWith, DoubleFlipAndFourQuarterTurnsAreIdentity) {
  std::mt19937_64 rng(48);
  for (int i = 0; i < 100; ++i) {
    const Sample s = random_sample(rng, "a", uniform_int(rng, 1, 30), uniform_int(rng, 1, 30));
    EXPECT_EQ(flip_rotate_with(flip_rotate_with(s, GeomTransform::horizontal_flip()),
                               GeomTransform::horizontal_flip()),
              s);
    Sample r = s;
    for (int q = 0; q < 4; ++q) r = flip_rotate_with(r, GeomTransform::rotate_90cw());
    EXPECT_EQ(r, s);
  }
}

TEST(ApplyFlipRotate, ExactTransformsKeepEveryLabel) {
  std::mt19937_64 rng(49);
  AugmentationPolicy p = all_off();
  p.p_flip_rot = 1;
  for (int i = 0; i < 200; ++i) {
    const Sample s = random_sample(rng, "s" + std::to_string(i), 16, 12);
    RngStream stream(3, s.image_id, 0);
    const Sample out = apply_flip_rotate(s, p, stream);
    ASSERT_EQ(out.annotations.size(), s.annotations.size());
    for (std::size_t k = 0; k < s.annotations.size(); ++k) {
      EXPECT_EQ(out.annotations[k].class_id, s.annotations[k].class_id);
    }
  }
}

TEST(MixupWith, LambdaOneKeepsTargetPixelsAndUnionsLabels) {
  std::mt19937_64 rng(50);
  for (int i = 0; i < 100; ++i) {
    const Sample t = random_sample(rng, "t", 14, 10);
    const Sample q = random_sample(rng, "q", 14, 10);
    const Sample out = mixup_with(t, q, 1.0);
    EXPECT_EQ(out.raster, t.raster);
    std::vector<Annotation> expected = t.annotations;
    expected.insert(expected.end(), q.annotations.begin(), q.annotations.end());
    EXPECT_EQ(out.annotations, expected);
    EXPECT_EQ(out.image_id, "t");
  }
}

TEST(MixupWith, PartnerWithoutLabelsAddsNone) {
  std::mt19937_64 rng(51);
  Sample t = random_sample(rng, "t", 8, 8);
  Sample q = random_sample(rng, "q", 8, 8);
  q.annotations.clear();
  EXPECT_EQ(mixup_with(t, q, 0.4).annotations, t.annotations);
}

TEST(MixupWith, ResizesMismatchedPartner) {
  std::mt19937_64 rng(52);
  const Sample t = random_sample(rng, "t", 16, 8);
  const Sample q = random_sample(rng, "q", 5, 9);
  const Sample out = mixup_with(t, q, 0.5);
  EXPECT_EQ(out.raster.width(), 16);
  EXPECT_EQ(out.raster.height(), 8);
}

TEST(ApplyMixup, LabelCountIsSumOfBoth) {
  std::mt19937_64 rng(53);
  AugmentationPolicy p = all_off();
  p.p_mixup = 1;
  for (int i = 0; i < 100; ++i) {
    const Sample t = random_sample(rng, "t", 10, 10);
    const Sample q = random_sample(rng, "q", 10, 10);
    RngStream stream(4, "t", static_cast<std::uint64_t>(i));
    EXPECT_EQ(apply_mixup(t, q, p, stream).annotations.size(), t.annotations.size() + q.annotations.size());
  }
}

TEST(CopyPaste, DonorWithoutLabelsLeavesTargetUnchanged) {
  std::mt19937_64 rng(54);
  const Sample t = random_sample(rng, "t", 10, 10);
  Sample d = random_sample(rng, "d", 10, 10);
  d.annotations.clear();
  AugmentationPolicy p = all_off();
  p.p_copy_paste = 1;
  RngStream stream(1, "t", 0);
  EXPECT_EQ(apply_copy_paste(t, d, p, stream), t);
}

TEST(CopyPaste, SingleForcedPasteTranslatesDonorBox) {
  std::mt19937_64 rng(55);
  const CanvasSize c{40, 30};
  Sample t;
  t.image_id = "t";
  t.raster = testing::filled(c.width, c.height, {0, 0, 0});
  t.annotations = {{0, grid_box(0, 0, 5, 5, c)}};
  Sample d;
  d.image_id = "d";
  d.raster = random_raster(rng, c.width, c.height);
  d.annotations = {{2, grid_box(3, 4, 11, 10, c)}};
  const PasteInstruction ins{0, {20, 15}};
  const Sample out = copy_paste_with(t, d, std::span(&ins, 1));
  ASSERT_EQ(out.annotations.size(), 2u);
  EXPECT_EQ(out.annotations[1].class_id, 2);
  const PixelBox pb = to_pixel(out.annotations[1].box, c);
  EXPECT_NEAR(pb.x_min, 20, 1e-9);
  EXPECT_NEAR(pb.y_min, 15, 1e-9);
  EXPECT_NEAR(pb.x_max, 28, 1e-9);
  EXPECT_NEAR(pb.y_max, 21, 1e-9);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      ASSERT_TRUE(std::equal(d.raster.pixel(3 + x, 4 + y), d.raster.pixel(3 + x, 4 + y) + 3,
                             out.raster.pixel(20 + x, 15 + y)));
    }
  }
}

TEST(CopyPaste, FullyCoveredTargetBoxIsRemoved) {
  const CanvasSize c{40, 30};
  Sample t;
  t.image_id = "t";
  t.raster = testing::filled(c.width, c.height, {0, 0, 0});
  t.annotations = {{0, grid_box(10, 10, 14, 14, c)}, {1, grid_box(30, 20, 35, 25, c)}};
  Sample d;
  d.image_id = "d";
  d.raster = testing::filled(c.width, c.height, {255, 255, 255});
  d.annotations = {{2, grid_box(0, 0, 10, 10, c)}};
  const PasteInstruction ins{0, {8, 8}};
  const Sample out = copy_paste_with(t, d, std::span(&ins, 1));
  ASSERT_EQ(out.annotations.size(), 2u);
  EXPECT_EQ(out.annotations[0].class_id, 1);
  EXPECT_EQ(out.annotations[1].class_id, 2);
}

TEST(CopyPaste, OcclusionRemovalMatchesPixelCount) {
  std::mt19937_64 rng(56);
  const CanvasSize c{36, 28};
  const double frac = kDefaultMinVisibleAreaFraction;
  for (int trial = 0; trial < 300; ++trial) {
    const Sample t = grid_sample(rng, "t", c, uniform_int(rng, 0, 4));
    const Sample d = grid_sample(rng, "d", c, uniform_int(rng, 1, 4));
    std::vector<PasteInstruction> ins;
    const int k = uniform_int(rng, 1, 3);
    for (int i = 0; i < k; ++i) {
      ins.push_back({static_cast<std::size_t>(uniform_int(rng, 0, int(d.annotations.size()) - 1)),
                     {uniform_int(rng, 0, c.width - 1), uniform_int(rng, 0, c.height - 1)}});
    }
    const Sample out = copy_paste_with(t, d, ins, frac);

    // Candidates in order: target boxes, then each pasted box clipped to the canvas.
    struct Cand {
      int cls;
      int x0, y0, x1, y1;
      std::size_t rank;
    };
    std::vector<Cand> cands;
    auto rect_of = [&](const BBox& b, CanvasSize cv) {
      const PixelBox p = to_pixel(b, cv);
      return std::array<int, 4>{int(std::lround(p.x_min)), int(std::lround(p.y_min)), int(std::lround(p.x_max)),
                                int(std::lround(p.y_max))};
    };
    for (const Annotation& a : t.annotations) {
      const auto r = rect_of(a.box, c);
      cands.push_back({a.class_id, r[0], r[1], r[2], r[3], 0});
    }
    std::vector<std::array<int, 4>> pastes;
    for (const auto& in : ins) {
      const auto r = rect_of(d.annotations[in.donor_annotation].box, c);
      const int x0 = in.dst_origin.x, y0 = in.dst_origin.y;
      const std::array<int, 4> placed{x0, y0, std::min(c.width, x0 + r[2] - r[0]),
                                      std::min(c.height, y0 + r[3] - r[1])};
      pastes.push_back(placed);
      cands.push_back({d.annotations[in.donor_annotation].class_id, placed[0], placed[1], placed[2],
                       placed[3], pastes.size()});
    }
    std::vector<std::pair<int, std::array<int, 4>>> expected;
    for (const Cand& cd : cands) {
      long long visible = 0, area = 0;
      for (int y = cd.y0; y < cd.y1; ++y) {
        for (int x = cd.x0; x < cd.x1; ++x) {
          ++area;
          bool covered = false;
          for (std::size_t p = cd.rank; p < pastes.size(); ++p) {
            const auto& q = pastes[p];
            covered |= x >= q[0] && x < q[2] && y >= q[1] && y < q[3];
          }
          visible += covered ? 0 : 1;
        }
      }
      if (visible >= frac * area) expected.push_back({cd.cls, {cd.x0, cd.y0, cd.x1, cd.y1}});
    }
    ASSERT_EQ(out.annotations.size(), expected.size()) << "trial " << trial;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(out.annotations[i].class_id, expected[i].first);
      EXPECT_EQ(rect_of(out.annotations[i].box, c), expected[i].second);
    }
  }
}

TEST(CopyPaste, DisjointPastesAddExactlyK) {
  std::mt19937_64 rng(57);
  const CanvasSize c{64, 64};
  for (int trial = 0; trial < 100; ++trial) {
    Sample t;
    t.image_id = "t";
    t.raster = random_raster(rng, c.width, c.height);
    t.annotations = {{0, grid_box(0, 0, 16, 16, c)}};
    Sample d = grid_sample(rng, "d", c, 0);
    for (int i = 0; i < 3; ++i) d.annotations.push_back({i, grid_box(0, 0, uniform_int(rng, 1, 10), uniform_int(rng, 1, 10), c)});
    const int k = uniform_int(rng, 1, 3);
    std::vector<PasteInstruction> ins;
    for (int i = 0; i < k; ++i) ins.push_back({static_cast<std::size_t>(i), {20 + 14 * i, 40}});
    EXPECT_EQ(copy_paste_with(t, d, ins).annotations.size(), t.annotations.size() + k);
  }
}

TEST(AugmentOnline, AllOffIsIdentity) {
  std::mt19937_64 rng(58);
  const Dataset pool = testing::random_dataset(rng, 5, "p");
  const PartnerSampler partners(pool);
  for (const Sample& s : pool.samples) {
    RngStream stream(1, s.image_id, 0);
    AugmentTrace trace;
    EXPECT_EQ(augment_online(s, partners, all_off(), stream, &trace), s);
    EXPECT_FALSE(trace.copy_paste || trace.mixup || trace.hsv || trace.flip_rot);
  }
}

TEST(AugmentOnline, AllOnIsReproducibleAndKeepsClassIds) {
  std::mt19937_64 rng(59);
  const Dataset pool = testing::random_dataset(rng, 8, "p");
  const PartnerSampler partners(pool);
  AugmentationPolicy p;
  p.p_copy_paste = p.p_mixup = p.p_hsv = p.p_flip_rot = 1;
  for (const Sample& s : pool.samples) {
    RngStream a(7, s.image_id, 2), b(7, s.image_id, 2);
    const Sample x = augment_online(s, partners, p, a);
    EXPECT_EQ(x, augment_online(s, partners, p, b));
    for (const Annotation& ann : x.annotations) {
      EXPECT_GE(ann.class_id, 0);
      EXPECT_LT(ann.class_id, 3);
      EXPECT_TRUE(ann.box.is_valid(0.0));
    }
  }
}

TEST(AugmentOnline, FiringRatesAtHalf) {
  const Dataset pool{"p", {"a"}, {Sample{"x", Raster(4, 4), {}, Origin::kReal}}};
  const PartnerSampler partners(pool);
  AugmentationPolicy p;
  p.copy_paste_max_instances = 1;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 10000; ++i) {
    RngStream stream(99, "x", static_cast<std::uint64_t>(i));
    AugmentTrace t;
    (void)augment_online(pool.samples[0], partners, p, stream, &t);
    counts[0] += t.copy_paste;
    counts[1] += t.mixup;
    counts[2] += t.hsv;
    counts[3] += t.flip_rot;
  }
  for (int c : counts) {
    EXPECT_GE(c, 4850);
    EXPECT_LE(c, 5150);
  }
}

TEST(MaterializeOffline, SizesIdsAndOrigins) {
  std::mt19937_64 rng(60);
  const Dataset ds = testing::random_dataset(rng, 10, "m");
  EXPECT_EQ(materialize_offline(ds, {}, 0, 1).samples, ds.samples);
  const Dataset out = materialize_offline(ds, {}, 2, 1);
  ASSERT_EQ(out.size(), 30u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < out.size(); ++i) {
    ids.insert(out.samples[i].image_id);
    EXPECT_EQ(out.samples[i].origin, i < 10 ? Origin::kReal : Origin::kAugmented);
  }
  EXPECT_EQ(ids.size(), 30u);
  EXPECT_TRUE(ids.count("m3_aug2"));
  EXPECT_NO_THROW(out.validate());
}

TEST(MaterializeOffline, IndependentOfWorkerCount) {
  std::mt19937_64 rng(61);
  const Dataset ds = testing::random_dataset(rng, 12, "m");
  AugmentationPolicy p;
  p.p_copy_paste = p.p_mixup = p.p_hsv = p.p_flip_rot = 0.7;
  const Dataset one = materialize_offline(ds, p, 3, 5, 1);
  EXPECT_EQ(one.samples, materialize_offline(ds, p, 3, 5, 4).samples);
  EXPECT_EQ(one.samples, materialize_offline(ds, p, 3, 5, 8).samples);
  EXPECT_NE(one.samples, materialize_offline(ds, p, 3, 6, 1).samples);
}

TEST(AugmentationPolicy, ValidationRejectsBadFields) {
  AugmentationPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.p_hsv = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.rotation_set.clear();
  EXPECT_THROW(p.validate(), Error);
  p.p_flip_rot = 0;
  EXPECT_NO_THROW(p.validate());
  p = {};
  p.mixup_alpha = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.rotation_set = {GeomTransform::horizontal_flip()};
  EXPECT_THROW(p.validate(), Error);
}

TEST(RngStream, SameKeyRepeatsDistinctKeysDiffer) {
  RngStream a(1, "img", 0), b(1, "img", 0), c(1, "img", 1), d(1, "img2", 0), e(2, "img", 0);
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    const auto vc = c.next_u64(), vd = d.next_u64(), ve = e.next_u64();
    if (i == 0) {
      EXPECT_NE(va, vc);
      EXPECT_NE(va, vd);
      EXPECT_NE(va, ve);
    }
  }
}

TEST(RngStream, PermutationIsAPermutation) {
  RngStream r(3, "perm", 0);
  auto p = r.permutation(100);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
}

TEST(RngStream, BetaIsPeakedForLargeAlpha) {
  RngStream r(4, "beta", 0);
  double sum = 0;
  for (int i = 0; i < 2000; ++i) {
    const double x = r.beta(32, 32);
    ASSERT_GT(x, 0);
    ASSERT_LT(x, 1);
    sum += x;
  }
  EXPECT_NEAR(sum / 2000, 0.5, 0.01);
}

}  // namespace
}  // namespace detmix
