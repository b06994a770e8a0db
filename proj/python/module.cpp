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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "detmix/augment.hpp"
#include "detmix/config.hpp"
#include "detmix/dataset.hpp"
#include "detmix/error.hpp"
#include "detmix/fingerprint.hpp"
#include "detmix/geom.hpp"
#include "detmix/harness.hpp"
#include "detmix/metrics.hpp"
#include "detmix/raster.hpp"
#include "detmix/report.hpp"
#include "detmix/toy.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

detmix::Raster to_raster(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw detmix::Error("expected an HxWx3 uint8 array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  return detmix::Raster(w, h, std::move(data));
}

ImageArray to_array(const detmix::Raster& r) {
  ImageArray out({r.height(), r.width(), 3});
  std::memcpy(out.mutable_data(), r.data().data(), r.data().size());
  return out;
}

py::dict report_dict(const detmix::EvalReport& r) {
  py::dict ap;
  for (std::size_t c = 0; c < r.class_ids.size(); ++c) {
    ap[py::int_(r.class_ids[c])] = std::vector<double>(r.ap[c].begin(), r.ap[c].end());
  }
  return py::dict("map50"_a = r.map50, "map50_95"_a = r.map50_95, "precision"_a = r.precision,
                  "recall"_a = r.recall, "f1"_a = r.f1, "ap"_a = ap,
                  "reporting_confidence"_a = r.reporting_confidence,
                  "provenance"_a = r.provenance);
}

}  // namespace

PYBIND11_MODULE(_detmix, m) {
  m.doc() = "Bindings for the detmix augmentation, mixing and evaluation library.";

  py::register_exception<detmix::Error>(m, "Error", PyExc_ValueError);

  py::class_<detmix::BBox>(m, "BBox")
      .def(py::init<double, double, double, double>(), "cx"_a, "cy"_a, "w"_a, "h"_a)
      .def_property_readonly("cx", &detmix::BBox::cx)
      .def_property_readonly("cy", &detmix::BBox::cy)
      .def_property_readonly("w", &detmix::BBox::w)
      .def_property_readonly("h", &detmix::BBox::h)
      .def("is_valid", &detmix::BBox::is_valid, "tolerance"_a = 1e-9)
      .def("__eq__", [](const detmix::BBox& a, const detmix::BBox& b) { return a == b; })
      .def("__repr__", [](const detmix::BBox& b) {
        return "BBox(" + std::to_string(b.cx()) + ", " + std::to_string(b.cy()) + ", " +
               std::to_string(b.w()) + ", " + std::to_string(b.h()) + ")";
      });

  m.def("iou", py::overload_cast<const detmix::BBox&, const detmix::BBox&>(&detmix::iou));
  m.def(
      "transform_box",
      [](const detmix::BBox& b, const std::string& kind, double angle, int width, int height) {
        detmix::GeomTransform t;
        if (kind == "hflip") t = detmix::GeomTransform::horizontal_flip();
        else if (kind == "vflip") t = detmix::GeomTransform::vertical_flip();
        else if (kind == "rot90") t = detmix::GeomTransform::rotate_90cw();
        else if (kind == "rot180") t = detmix::GeomTransform::rotate_180();
        else if (kind == "rot270") t = detmix::GeomTransform::rotate_270cw();
        else if (kind == "rotate") t = detmix::GeomTransform::rotate(angle);
        else throw detmix::Error("unknown transform '" + kind + "'");
        return detmix::transform_box(b, t, {width, height});
      },
      "box"_a, "kind"_a, "angle"_a = 0.0, "width"_a = 640, "height"_a = 640,
      "Transforms a box; kind is hflip, vflip, rot90, rot180, rot270 or rotate.");

  m.def(
      "hsv_scale",
      [](const ImageArray& img, double h, double s, double v) {
        return to_array(detmix::hsv_scale(to_raster(img), {h, s, v}));
      },
      "image"_a, "h"_a = 1.0, "s"_a = 1.0, "v"_a = 1.0);
  m.def(
      "blend",
      [](const ImageArray& a, const ImageArray& b, double lambda) {
        return to_array(detmix::blend(to_raster(a), to_raster(b), lambda));
      },
      "a"_a, "b"_a, "lam"_a);
  m.def(
      "flip",
      [](const ImageArray& img, bool horizontal) {
        return to_array(detmix::flip_raster(
            to_raster(img), horizontal ? detmix::FlipAxis::kHorizontal : detmix::FlipAxis::kVertical));
      },
      "image"_a, "horizontal"_a = true);

  py::class_<detmix::Detection>(m, "Detection")
      .def(py::init([](std::string image_id, int class_id, const detmix::BBox& box, double conf) {
             return detmix::Detection{std::move(image_id), class_id, box, conf};
           }),
           "image_id"_a, "class_id"_a, "box"_a, "confidence"_a)
      .def_readonly("image_id", &detmix::Detection::image_id)
      .def_readonly("class_id", &detmix::Detection::class_id)
      .def_readonly("box", &detmix::Detection::box)
      .def_readonly("confidence", &detmix::Detection::confidence);

  py::class_<detmix::GroundTruth>(m, "GroundTruth")
      .def(py::init([](std::string image_id, int class_id, const detmix::BBox& box) {
             return detmix::GroundTruth{std::move(image_id), class_id, box};
           }),
           "image_id"_a, "class_id"_a, "box"_a)
      .def_readonly("image_id", &detmix::GroundTruth::image_id)
      .def_readonly("class_id", &detmix::GroundTruth::class_id)
      .def_readonly("box", &detmix::GroundTruth::box);

  m.def(
      "nms",
      [](const std::vector<detmix::Detection>& dets, double iou) { return detmix::nms(dets, iou); },
      "detections"_a, "iou_threshold"_a = 0.7);
  m.def(
      "map_at",
      [](const std::vector<detmix::Detection>& dets, const std::vector<detmix::GroundTruth>& gts,
         double iou, int jobs) { return detmix::map_at(dets, gts, iou, jobs); },
      "detections"_a, "ground_truth"_a, "iou_threshold"_a, "jobs"_a = 1);
  m.def(
      "map_range",
      [](const std::vector<detmix::Detection>& dets, const std::vector<detmix::GroundTruth>& gts,
         int jobs) { return detmix::map_range(dets, gts, jobs); },
      "detections"_a, "ground_truth"_a, "jobs"_a = 1);
  m.def(
      "evaluate",
      [](const std::vector<detmix::Detection>& dets, const std::vector<detmix::GroundTruth>& gts,
         double reporting_confidence, int jobs) {
        detmix::EvalConfig cfg;
        cfg.reporting_confidence = reporting_confidence;
        cfg.jobs = jobs;
        return report_dict(detmix::evaluate(dets, gts, cfg));
      },
      "detections"_a, "ground_truth"_a, "reporting_confidence"_a = 0.25, "jobs"_a = 1);

  m.def(
      "split_sizes",
      [](std::size_t n, double train, double val, double test) {
        const auto s = detmix::split_sizes(n, {train, val, test, 0});
        return py::make_tuple(s.train, s.val, s.test);
      },
      "n"_a, "train"_a = 0.70, "val"_a = 0.15, "test"_a = 0.15);
  m.def("synthetic_count", &detmix::synthetic_count, "base_size"_a, "share_percent"_a);
  m.def("round_half_up_milli", &detmix::round_half_up_milli, "value"_a);

  m.def(
      "load_dataset",
      [](const std::filesystem::path& root, std::vector<std::string> classes) {
        const auto ds = detmix::load_dataset(root, std::move(classes));
        py::list samples;
        for (const auto& s : ds.samples) {
          py::list labels;
          for (const auto& a : s.annotations) labels.append(py::make_tuple(a.class_id, a.box));
          samples.append(py::dict("image_id"_a = s.image_id, "image"_a = to_array(s.raster),
                                  "labels"_a = labels));
        }
        return py::dict("classes"_a = ds.classes, "samples"_a = samples,
                        "fingerprint"_a = detmix::dataset_fingerprint(ds));
      },
      "root"_a, "classes"_a = std::vector<std::string>{});
  m.def(
      "make_toy_dataset",
      [](const std::filesystem::path& root, std::size_t count, std::uint64_t seed) {
        const auto ds = detmix::make_toy_scenes(count, {}, seed, detmix::kDefaultClasses);
        detmix::write_dataset(ds, root);
        return detmix::dataset_fingerprint(ds);
      },
      "root"_a, "count"_a, "seed"_a = 0,
      "Writes toy scenes to `root` and returns their fingerprint.");

  m.def(
      "plan",
      [](const std::filesystem::path& config) {
        std::vector<std::string> ids;
        for (const auto& r : detmix::plan_experiments(detmix::load_config(config))) {
          ids.push_back(r.run_id);
        }
        return ids;
      },
      "config"_a, "Run ids of the experiment matrix described by a config file.");
  m.def(
      "trainer_config",
      [](const std::filesystem::path& config, const std::string& run_id) {
        const auto cfg = detmix::load_config(config);
        for (const auto& r : detmix::plan_experiments(cfg)) {
          if (r.run_id == run_id) return detmix::trainer_config_text(r, cfg);
        }
        throw detmix::Error("unknown run id '" + run_id + "'");
      },
      "config"_a, "run_id"_a);
}
