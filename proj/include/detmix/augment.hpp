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

#include <cstdint>
#include <span>
#include <vector>

#include "detmix/geom.hpp"
#include "detmix/raster.hpp"
#include "detmix/rng.hpp"
#include "detmix/sample.hpp"

namespace detmix {

struct AugmentationPolicy {
  double p_copy_paste = 0.5;
  double p_mixup = 0.5;
  double p_hsv = 0.5;
  double p_flip_rot = 0.5;
  HsvGains hsv_gains;
  double mixup_alpha = 32.0;
  std::vector<GeomTransform> rotation_set = {GeomTransform::rotate_90cw(),
                                             GeomTransform::rotate_180(),
                                             GeomTransform::rotate_270cw()};
  int copy_paste_max_instances = 3;
  double min_visible_area_fraction = kDefaultMinVisibleAreaFraction;

  // Throws detmix::Error when a field is out of range.
  void validate() const;
};

// One pasted instance: which donor annotation, and where its patch goes.
struct PasteInstruction {
  std::size_t donor_annotation = 0;
  PixelPoint dst_origin;
};

// Supplies random partners for mixup and copy-paste.
class PartnerSampler {
 public:
  explicit PartnerSampler(const Dataset& pool) : pool_(&pool) {}
  // Throws detmix::Error when the pool is empty.
  const Sample& draw(RngStream& rng) const;

 private:
  const Dataset* pool_;
};

// Which augmentations fired during one augment_online call.
struct AugmentTrace {
  bool copy_paste = false;
  bool mixup = false;
  bool hsv = false;
  bool flip_rot = false;
};

// Deterministic building blocks; the apply_* functions draw their parameters
// and delegate here.
Sample flip_rotate_with(const Sample& sample, const GeomTransform& t,
                        double min_visible_area_fraction = kDefaultMinVisibleAreaFraction);
Sample mixup_with(const Sample& target, const Sample& partner, double lambda);
Sample copy_paste_with(const Sample& target, const Sample& donor,
                       std::span<const PasteInstruction> instructions,
                       double min_visible_area_fraction = kDefaultMinVisibleAreaFraction);

Sample apply_hsv(const Sample& sample, const AugmentationPolicy& policy, RngStream& rng);
Sample apply_flip_rotate(const Sample& sample, const AugmentationPolicy& policy, RngStream& rng);
Sample apply_mixup(const Sample& target, const Sample& partner, const AugmentationPolicy& policy,
                   RngStream& rng);
Sample apply_copy_paste(const Sample& target, const Sample& donor,
                        const AugmentationPolicy& policy, RngStream& rng);

// Runs copy-paste, mixup, HSV and flip/rotate in that order, each with its
// own probability.
Sample augment_online(const Sample& sample, const PartnerSampler& partners,
                      const AugmentationPolicy& policy, RngStream& rng,
                      AugmentTrace* trace = nullptr);

// The original samples followed by `variants_per_image` augmented copies of
// each, ids suffixed "_aug<k>". Variant k of image i uses the stream
// (seed, image id, k), so the output does not depend on `jobs`.
Dataset materialize_offline(const Dataset& dataset, const AugmentationPolicy& policy,
                            int variants_per_image, std::uint64_t seed, int jobs = 1);

}  // namespace detmix
