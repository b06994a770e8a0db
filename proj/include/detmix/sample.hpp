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

#include <string>
#include <string_view>
#include <vector>

#include "detmix/geom.hpp"
#include "detmix/raster.hpp"

namespace detmix {

struct Annotation {
  int class_id = 0;
  BBox box;
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

enum class Origin { kReal, kSynthetic, kAugmented };

const char* to_string(Origin origin);

struct Sample {
  std::string image_id;
  Raster raster;
  std::vector<Annotation> annotations;
  Origin origin = Origin::kReal;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Named collection of samples sharing one class table.
struct Dataset {
  std::string name;
  std::vector<std::string> classes;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  // Throws detmix::Error on an empty class table, duplicate image ids,
  // out-of-range class ids or invalid boxes.
  void validate() const;
};

}  // namespace detmix
