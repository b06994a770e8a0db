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

#include "detmix/sample.hpp"

namespace detmix {

// Hex SHA-256 over the class table and every sample in image-id order:
// id, origin, raster size and bytes, and the canonical label text.
// Sample order inside the dataset does not affect the result.
std::string dataset_fingerprint(const Dataset& dataset);

std::string sha256_hex(std::string_view bytes);

}  // namespace detmix
