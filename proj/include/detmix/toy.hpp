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
#include <string>
#include <vector>

#include "detmix/metrics.hpp"
#include "detmix/sample.hpp"

namespace detmix {

// Flat-colored rectangles on gray noise. Class c is drawn in a color whose
// channel c is bright and whose other channels are dark, so a per-channel
// threshold recovers every object exactly.
struct ToySceneOptions {
  int width = 160;
  int height = 160;
  int min_objects = 1;
  int max_objects = 4;
  int min_side = 12;
  int max_side = 40;
  int num_classes = 3;  // at most 3
  std::string id_prefix = "toy";
};

Dataset make_toy_scenes(std::size_t count, const ToySceneOptions& options, std::uint64_t seed,
                        const std::vector<std::string>& classes);

enum class StubMode {
  kDetect,  // threshold the colors and box each connected component
  kEcho,    // copy the annotations with confidence 1
  kJitter,  // detect, then shift each box sideways by half its width
};

// Stand-in for an external detector on toy scenes.
std::vector<Detection> stub_detect(const Sample& sample, StubMode mode);
std::vector<Detection> stub_detect(const Dataset& dataset, StubMode mode, int jobs = 1);

}  // namespace detmix
