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

#include "detmix/fingerprint.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>

#include "detmix/dataset.hpp"
#include "detmix/error.hpp"

namespace detmix {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256: digest init failed");
    }
  }

  void update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) throw Error("sha256: update failed");
  }
  void update(std::string_view s) { update(s.data(), s.size()); }
  // Length prefix keeps field boundaries unambiguous.
  void field(std::string_view s) {
    update_u64(s.size());
    update(s);
  }
  void update_u64(std::uint64_t v) {
    unsigned char le[8];
    for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
    update(le, 8);
  }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), digest, &len) != 1) throw Error("sha256: final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 15]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes);
  return h.hex();
}

std::string dataset_fingerprint(const Dataset& dataset) {
  std::vector<const Sample*> order;
  order.reserve(dataset.samples.size());
  for (const Sample& s : dataset.samples) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const Sample* a, const Sample* b) { return a->image_id < b->image_id; });

  Sha256 h;
  h.field("detmix-dataset-v1");
  h.update_u64(dataset.classes.size());
  for (const std::string& c : dataset.classes) h.field(c);
  h.update_u64(order.size());
  for (const Sample* s : order) {
    h.field(s->image_id);
    h.field(to_string(s->origin));
    h.update_u64(static_cast<std::uint64_t>(s->raster.width()));
    h.update_u64(static_cast<std::uint64_t>(s->raster.height()));
    const auto bytes = s->raster.data();
    h.update_u64(bytes.size());
    h.update(bytes.data(), bytes.size());
    h.field(format_labels(s->annotations));
  }
  return h.hex();
}

}  // namespace detmix
