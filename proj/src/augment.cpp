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

#include "detmix/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "detmix/error.hpp"
#include "detmix/parallel.hpp"

namespace detmix {
namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0 && p <= 1)) {
    throw Error(std::string("augmentation policy: ") + name + " must be in [0, 1]");
  }
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Pixel rectangle covered by a donor box, at least one pixel wide and tall.
PixelRect donor_rect(const BBox& box, CanvasSize canvas) {
  const PixelBox p = to_pixel(box, canvas);
  auto span = [](double lo, double hi, int limit) {
    int a = std::clamp(round_half_up(lo), 0, limit);
    int b = std::clamp(round_half_up(hi), 0, limit);
    if (b <= a) {
      b = std::min(a + 1, limit);
      a = b - 1;
    }
    return std::pair{a, b};
  };
  const auto [x0, x1] = span(p.x_min, p.x_max, canvas.width);
  const auto [y0, y1] = span(p.y_min, p.y_max, canvas.height);
  return {x0, y0, x1 - x0, y1 - y0};
}

struct Rect {
  double x0, y0, x1, y1;
  double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
};

// Area of `box` not covered by any of `occluders`, by coordinate compression.
double uncovered_area(const Rect& box, std::span<const Rect> occluders) {
  if (occluders.empty()) return box.area();
  std::vector<double> xs{box.x0, box.x1};
  std::vector<double> ys{box.y0, box.y1};
  for (const Rect& o : occluders) {
    for (double x : {o.x0, o.x1}) {
      if (x > box.x0 && x < box.x1) xs.push_back(x);
    }
    for (double y : {o.y0, o.y1}) {
      if (y > box.y0 && y < box.y1) ys.push_back(y);
    }
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double visible = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mx = (xs[i] + xs[i + 1]) / 2;
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double my = (ys[j] + ys[j + 1]) / 2;
      const bool covered = std::any_of(occluders.begin(), occluders.end(), [&](const Rect& o) {
        return mx > o.x0 && mx < o.x1 && my > o.y0 && my < o.y1;
      });
      if (!covered) visible += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    }
  }
  return visible;
}

Rect visible_rect(const BBox& box, CanvasSize canvas) {
  const PixelBox p = to_pixel(box, canvas);
  return {std::max(0.0, p.x_min), std::max(0.0, p.y_min),
          std::min<double>(canvas.width, p.x_max), std::min<double>(canvas.height, p.y_max)};
}

GeomTransform draw_transform(const AugmentationPolicy& policy, RngStream& rng) {
  const auto choices = static_cast<std::int64_t>(policy.rotation_set.size()) + 2;
  const auto pick = rng.uniform_int(0, choices - 1);
  if (pick == 0) return GeomTransform::horizontal_flip();
  if (pick == 1) return GeomTransform::vertical_flip();
  return policy.rotation_set[static_cast<std::size_t>(pick - 2)];
}

Sample copy_paste_drawn(const Sample& target, const Sample& donor,
                        const AugmentationPolicy& policy, RngStream& rng) {
  if (donor.annotations.empty()) return target;
  const auto wanted = rng.uniform_int(1, policy.copy_paste_max_instances);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(wanted), donor.annotations.size());
  std::vector<std::size_t> order(donor.annotations.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<PasteInstruction> instructions;
  instructions.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size()) - 1));
    std::swap(order[i], order[j]);
    const PixelRect rect = donor_rect(donor.annotations[order[i]].box, donor.raster.canvas());
    const int pw = std::min(rect.width, target.raster.width());
    const int ph = std::min(rect.height, target.raster.height());
    PixelPoint at;
    at.x = static_cast<int>(rng.uniform_int(0, target.raster.width() - pw));
    at.y = static_cast<int>(rng.uniform_int(0, target.raster.height() - ph));
    instructions.push_back({order[i], at});
  }
  return copy_paste_with(target, donor, instructions, policy.min_visible_area_fraction);
}

Sample mixup_drawn(const Sample& target, const Sample& partner, const AugmentationPolicy& policy,
                   RngStream& rng) {
  const double lambda = rng.beta(policy.mixup_alpha, policy.mixup_alpha);
  return mixup_with(target, partner, lambda);
}

Sample flip_rotate_drawn(const Sample& sample, const AugmentationPolicy& policy, RngStream& rng) {
  return flip_rotate_with(sample, draw_transform(policy, rng), policy.min_visible_area_fraction);
}

Sample hsv_drawn(const Sample& sample, const AugmentationPolicy& policy, RngStream& rng) {
  Sample out = sample;
  out.raster = hsv_jitter(sample.raster, policy.hsv_gains, rng);
  return out;
}

}  // namespace

void AugmentationPolicy::validate() const {
  require_probability(p_copy_paste, "p_copy_paste");
  require_probability(p_mixup, "p_mixup");
  require_probability(p_hsv, "p_hsv");
  require_probability(p_flip_rot, "p_flip_rot");
  if (hsv_gains.h_gain < 0 || hsv_gains.s_gain < 0 || hsv_gains.v_gain < 0) {
    throw Error("augmentation policy: hsv gains must be non-negative");
  }
  if (!(mixup_alpha > 0)) throw Error("augmentation policy: mixup_alpha must be positive");
  if (copy_paste_max_instances < 1) {
    throw Error("augmentation policy: copy_paste_max_instances must be positive");
  }
  if (p_flip_rot > 0 && rotation_set.empty()) {
    throw Error("augmentation policy: rotation_set must be non-empty when p_flip_rot > 0");
  }
  for (const GeomTransform& t : rotation_set) {
    if (!t.is_rotation()) throw Error("augmentation policy: rotation_set holds a non-rotation");
  }
  require_probability(min_visible_area_fraction, "min_visible_area_fraction");
}

const Sample& PartnerSampler::draw(RngStream& rng) const {
  if (pool_->samples.empty()) throw Error("partner sampler: dataset is empty");
  const auto i = rng.uniform_int(0, static_cast<std::int64_t>(pool_->samples.size()) - 1);
  return pool_->samples[static_cast<std::size_t>(i)];
}

Sample flip_rotate_with(const Sample& sample, const GeomTransform& t,
                        double min_visible_area_fraction) {
  Sample out;
  out.image_id = sample.image_id;
  out.origin = sample.origin;
  out.raster = transform_raster(sample.raster, t);
  out.annotations.reserve(sample.annotations.size());
  for (const Annotation& a : sample.annotations) {
    if (auto box = transform_box(a.box, t, sample.raster.canvas(), min_visible_area_fraction)) {
      out.annotations.push_back({a.class_id, *box});
    }
  }
  return out;
}

Sample mixup_with(const Sample& target, const Sample& partner, double lambda) {
  Sample out;
  out.image_id = target.image_id;
  out.origin = target.origin;
  const Raster resized =
      resize_bilinear(partner.raster, target.raster.width(), target.raster.height());
  out.raster = blend(target.raster, resized, lambda);
  out.annotations = target.annotations;
  out.annotations.insert(out.annotations.end(), partner.annotations.begin(),
                         partner.annotations.end());
  return out;
}

Sample copy_paste_with(const Sample& target, const Sample& donor,
                       std::span<const PasteInstruction> instructions,
                       double min_visible_area_fraction) {
  const CanvasSize canvas = target.raster.canvas();
  Sample out = target;

  // paste_rank[i]: how many pastes preceded annotation i (0 for originals).
  std::vector<std::size_t> paste_rank(out.annotations.size(), 0);
  std::vector<Rect> pasted;
  for (const PasteInstruction& ins : instructions) {
    if (ins.donor_annotation >= donor.annotations.size()) {
      throw Error("copy_paste: donor annotation index out of range");
    }
    const Annotation& src = donor.annotations[ins.donor_annotation];
    PixelRect rect = donor_rect(src.box, donor.raster.canvas());
    rect.width = std::min(rect.width, canvas.width);
    rect.height = std::min(rect.height, canvas.height);
    const Rect placed{
        static_cast<double>(std::max(0, ins.dst_origin.x)),
        static_cast<double>(std::max(0, ins.dst_origin.y)),
        static_cast<double>(std::min(canvas.width, ins.dst_origin.x + rect.width)),
        static_cast<double>(std::min(canvas.height, ins.dst_origin.y + rect.height))};
    if (placed.area() <= 0) continue;
    out.raster = paste_patch(out.raster, donor.raster, rect, ins.dst_origin);
    pasted.push_back(placed);
    out.annotations.push_back(
        {src.class_id, to_normalized({placed.x0, placed.y0, placed.x1, placed.y1}, canvas)});
    paste_rank.push_back(pasted.size());
  }
  if (pasted.empty()) return out;

  std::vector<Annotation> kept;
  kept.reserve(out.annotations.size());
  for (std::size_t i = 0; i < out.annotations.size(); ++i) {
    const Rect r = visible_rect(out.annotations[i].box, canvas);
    const std::span<const Rect> later(pasted.begin() + static_cast<std::ptrdiff_t>(paste_rank[i]),
                                      pasted.end());
    const double area = r.area();
    if (area > 0 && uncovered_area(r, later) < min_visible_area_fraction * area) continue;
    kept.push_back(out.annotations[i]);
  }
  out.annotations = std::move(kept);
  return out;
}

Sample apply_hsv(const Sample& sample, const AugmentationPolicy& policy, RngStream& rng) {
  if (!rng.bernoulli(policy.p_hsv)) return sample;
  return hsv_drawn(sample, policy, rng);
}

Sample apply_flip_rotate(const Sample& sample, const AugmentationPolicy& policy, RngStream& rng) {
  if (!rng.bernoulli(policy.p_flip_rot)) return sample;
  return flip_rotate_drawn(sample, policy, rng);
}

Sample apply_mixup(const Sample& target, const Sample& partner, const AugmentationPolicy& policy,
                   RngStream& rng) {
  if (!rng.bernoulli(policy.p_mixup)) return target;
  return mixup_drawn(target, partner, policy, rng);
}

Sample apply_copy_paste(const Sample& target, const Sample& donor,
                        const AugmentationPolicy& policy, RngStream& rng) {
  if (!rng.bernoulli(policy.p_copy_paste)) return target;
  return copy_paste_drawn(target, donor, policy, rng);
}

Sample augment_online(const Sample& sample, const PartnerSampler& partners,
                      const AugmentationPolicy& policy, RngStream& rng, AugmentTrace* trace) {
  AugmentTrace fired;
  Sample out = sample;
  if ((fired.copy_paste = rng.bernoulli(policy.p_copy_paste))) {
    out = copy_paste_drawn(out, partners.draw(rng), policy, rng);
  }
  if ((fired.mixup = rng.bernoulli(policy.p_mixup))) {
    out = mixup_drawn(out, partners.draw(rng), policy, rng);
  }
  if ((fired.hsv = rng.bernoulli(policy.p_hsv))) {
    out = hsv_drawn(out, policy, rng);
  }
  if ((fired.flip_rot = rng.bernoulli(policy.p_flip_rot))) {
    out = flip_rotate_drawn(out, policy, rng);
  }
  if (trace != nullptr) *trace = fired;
  return out;
}

Dataset materialize_offline(const Dataset& dataset, const AugmentationPolicy& policy,
                            int variants_per_image, std::uint64_t seed, int jobs) {
  if (variants_per_image < 0) throw Error("materialize_offline: variants_per_image must be >= 0");
  policy.validate();
  Dataset out{dataset.name, dataset.classes, dataset.samples};
  if (variants_per_image == 0 || dataset.samples.empty()) return out;

  const std::size_t n = dataset.samples.size();
  const auto k = static_cast<std::size_t>(variants_per_image);
  out.samples.resize(n + n * k);
  const PartnerSampler partners(dataset);
  parallel_for(n * k, jobs, [&](std::size_t item) {
    const std::size_t image = item / k;
    const std::size_t variant = item % k + 1;
    const Sample& src = dataset.samples[image];
    RngStream rng(seed, src.image_id, variant);
    Sample aug = augment_online(src, partners, policy, rng);
    aug.image_id = src.image_id + "_aug" + std::to_string(variant);
    aug.origin = Origin::kAugmented;
    out.samples[n + item] = std::move(aug);
  });
  return out;
}

}  // namespace detmix
