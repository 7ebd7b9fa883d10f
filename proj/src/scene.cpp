// Copyright 2026 The SegLink Authors. All Rights Reserved.
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

#include "seglink/scene.hpp"

#include <set>
#include <string>

#include "seglink/errors.hpp"

namespace seglink {

std::vector<RotatedRect> Scene::rects() const {
  std::vector<RotatedRect> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.rect);
  return out;
}

void validate(const Scene& s) {
  if (s.canvas_w <= 0 || s.canvas_h <= 0 || s.canvas_w % kSizeQuantum != 0 ||
      s.canvas_h % kSizeQuantum != 0) {
    throw InvalidSize("scene canvas " + std::to_string(s.canvas_w) + "x" +
                      std::to_string(s.canvas_h) + " is not a multiple of 128");
  }
  std::set<int> ids;
  const AlignedBox canvas{0.0, 0.0, static_cast<double>(s.canvas_w),
                          static_cast<double>(s.canvas_h)};
  for (const auto& w : s.words) {
    if (w.id < 0) throw InconsistentLabel("word ids must be non-negative");
    if (!ids.insert(w.id).second) {
      throw InconsistentLabel("duplicate word id " + std::to_string(w.id));
    }
    if (!canvas.contains(axis_aligned_bbox(w.rect).center())) {
      throw InvalidGeometry("word " + std::to_string(w.id) + " lies outside the canvas");
    }
  }
}

}  // namespace seglink
