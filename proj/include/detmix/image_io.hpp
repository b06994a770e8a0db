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
#include <filesystem>
#include <span>
#include <vector>

#include "detmix/raster.hpp"

namespace detmix {

// Lossless 8-bit RGB PNG. Output bytes depend only on the raster.
std::vector<std::uint8_t> encode_png(const Raster& img);
Raster decode_png(std::span<const std::uint8_t> bytes);
Raster decode_jpeg(std::span<const std::uint8_t> bytes);

// Picks the decoder from the extension (.png, .jpg, .jpeg).
Raster read_image(const std::filesystem::path& path);
void write_png(const Raster& img, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace detmix
