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

// Command-line front end for the detmix experiment harness.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detmix/config.hpp"
#include "detmix/dataset.hpp"
#include "detmix/error.hpp"
#include "detmix/harness.hpp"
#include "detmix/toy.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

detmix::ExperimentConfig load(const GlobalOptions& g) {
  if (g.config_path.empty()) throw detmix::Error("this command needs --config <path>");
  detmix::ExperimentConfig cfg = detmix::load_config(g.config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.split.seed = *g.seed;
  }
  return cfg;
}

std::uint64_t seed_or(const GlobalOptions& g, std::uint64_t fallback) {
  return g.seed.value_or(fallback);
}

detmix::StubMode parse_mode(const std::string& s) {
  if (s == "detect") return detmix::StubMode::kDetect;
  if (s == "echo") return detmix::StubMode::kEcho;
  if (s == "jitter") return detmix::StubMode::kJitter;
  throw detmix::Error("unknown stub mode '" + s + "'");
}

std::vector<std::string> class_table(const std::string& comma_list) {
  if (comma_list.empty()) return detmix::kDefaultClasses;
  std::vector<std::string> out;
  std::string cur;
  for (char c : comma_list + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detmix: augmentation and synthetic-data mixing experiments for object detection"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Experiment config (YAML)");
  app.add_option("--seed", g.seed, "Override the global seed");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> runs;
  auto add_run_filter = [&runs](CLI::App* cmd) {
    cmd->add_option("--run", runs, "Restrict to these run ids (repeatable)");
  };

  auto* plan = app.add_subcommand("plan", "Write planned run records and list the run matrix");
  add_run_filter(plan);
  auto* prepare = app.add_subcommand("prepare", "Split the dataset and build each run's training set");
  add_run_filter(prepare);
  auto* emit = app.add_subcommand("emit-config", "Write trainer configuration files");
  add_run_filter(emit);

  std::string aug_input, aug_output;
  int aug_variants = 1;
  auto* aug = app.add_subcommand("augment-offline", "Materialize augmented copies of a dataset");
  aug->add_option("--input", aug_input, "Dataset directory (default: <work>/splits/train)");
  aug->add_option("--output", aug_output, "Output directory (default: <work>/augmented)");
  aug->add_option("--variants", aug_variants, "Augmented copies per image")->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "Score prediction dumps against the test split");
  add_run_filter(evaluate);
  auto* report = app.add_subcommand("report", "Render mAP50 and mAP50-95 tables");

  std::string stats_dataset;
  auto* stats = app.add_subcommand("stats", "Improvement over the baseline, or dataset statistics");
  stats->add_option("--dataset", stats_dataset, "Print statistics of this dataset directory instead");

  std::string toy_output, toy_classes;
  std::size_t toy_count = 20;
  detmix::ToySceneOptions toy_opts;
  auto* toy = app.add_subcommand("toy-scenes", "Generate labeled toy scenes");
  toy->add_option("--output", toy_output, "Output dataset directory")->required();
  toy->add_option("--count", toy_count, "Number of images");
  toy->add_option("--width", toy_opts.width, "Image width");
  toy->add_option("--height", toy_opts.height, "Image height");
  toy->add_option("--classes", toy_classes, "Comma-separated class table");
  toy->add_option("--prefix", toy_opts.id_prefix, "Image id prefix");

  std::string stub_images, stub_output, stub_mode = "detect";
  auto* stub = app.add_subcommand("stub-detect", "Run the color-threshold detector stub");
  stub->add_option("--images", stub_images, "Dataset directory")->required();
  stub->add_option("--output", stub_output, "Prediction directory")->required();
  stub->add_option("--mode", stub_mode, "detect, echo or jitter");

  std::string pl_images, pl_predictions, pl_output;
  detmix::PseudoLabelOptions pl_opts;
  auto* pseudo = app.add_subcommand("pseudo-label", "Turn predictions into labels for synthetic images");
  pseudo->add_option("--images", pl_images, "Dataset directory with the images")->required();
  pseudo->add_option("--predictions", pl_predictions, "Prediction directory")->required();
  pseudo->add_option("--output", pl_output, "Output dataset directory")->required();
  pseudo->add_option("--conf", pl_opts.conf_threshold, "Confidence threshold");
  pseudo->add_option("--nms-iou", pl_opts.nms_iou, "NMS IoU threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    const detmix::CommandOptions opts{g.jobs, runs};
    if (plan->parsed()) {
      for (const auto& r : detmix::command_plan(load(g), opts)) {
        std::cout << r.run_id << '\t' << detmix::to_string(r.status) << '\n';
      }
    } else if (prepare->parsed()) {
      for (const auto& r : detmix::command_prepare(load(g), opts)) {
        std::cout << r.run_id << '\t' << r.dataset_path << '\t' << r.dataset_fingerprint << '\n';
      }
    } else if (emit->parsed()) {
      for (const auto& p : detmix::command_emit_config(load(g), opts)) std::cout << p.string() << '\n';
    } else if (aug->parsed()) {
      const auto cfg = load(g);
      const fs::path in = aug_input.empty() ? cfg.paths.work_dir / "splits" / "train" : fs::path(aug_input);
      const fs::path out = aug_output.empty() ? cfg.paths.work_dir / "augmented" : fs::path(aug_output);
      const auto ds = detmix::command_augment_offline(cfg, in, out, aug_variants, g.jobs);
      std::cout << "wrote " << ds.size() << " images to " << out.string() << '\n';
    } else if (evaluate->parsed()) {
      for (const auto& r : detmix::command_evaluate(load(g), opts)) {
        std::cout << r.run_id << "\tmap50=" << r.report->map50
                  << "\tmap50_95=" << r.report->map50_95 << '\n';
      }
    } else if (report->parsed()) {
      for (const auto& p : detmix::command_report(load(g))) std::cout << p.string() << '\n';
    } else if (stats->parsed()) {
      if (!stats_dataset.empty()) {
        std::vector<std::string> classes;
        if (!g.config_path.empty()) classes = load(g).classes;
        const auto ds = detmix::load_dataset(stats_dataset, classes, detmix::Origin::kReal, g.jobs);
        std::cout << detmix::format_stats(ds, detmix::dataset_stats(ds));
      } else {
        std::cout << detmix::command_stats(load(g));
      }
    } else if (toy->parsed()) {
      const auto ds = detmix::make_toy_scenes(toy_count, toy_opts, seed_or(g, 0), class_table(toy_classes));
      detmix::write_dataset(ds, toy_output, g.jobs);
      std::cout << "wrote " << ds.size() << " toy scenes to " << toy_output << '\n';
    } else if (stub->parsed()) {
      const auto ds = detmix::load_dataset(stub_images, {}, detmix::Origin::kReal, g.jobs);
      const auto dets = detmix::stub_detect(ds, parse_mode(stub_mode), g.jobs);
      detmix::write_prediction_files(stub_output, ds, dets);
      std::cout << "wrote " << dets.size() << " detections to " << stub_output << '\n';
    } else if (pseudo->parsed()) {
      const auto ds = detmix::load_dataset(pl_images, {}, detmix::Origin::kSynthetic, g.jobs);
      std::map<std::string, std::vector<detmix::Detection>> preds;
      for (const auto& s : ds.samples) {
        const fs::path f = fs::path(pl_predictions) / (s.image_id + ".txt");
        if (fs::exists(f)) preds[s.image_id] = detmix::read_prediction_file(f, s.image_id);
      }
      const auto labeled = detmix::pseudo_label(ds, preds, pl_opts);
      detmix::write_dataset(labeled, pl_output, g.jobs);
      std::cout << "wrote " << labeled.size() << " pseudo-labeled images to " << pl_output << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "detmix: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
