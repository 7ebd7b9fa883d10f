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

#pragma once

#include <cstdint>
#include <vector>

#include "seglink/geometry.hpp"
#include "seglink/topology.hpp"

namespace seglink {

struct WordBox {
  RotatedRect rect;
  int id = 0;  ///< non-negative, unique within a scene

  friend bool operator==(const WordBox&, const WordBox&) = default;
};

/// A canvas with oriented word boxes. Synthetic scenes keep every word
/// inside the canvas; cropped scenes only guarantee each word's bounding
/// box center is inside.
struct Scene {
  int canvas_w = 512;
  int canvas_h = 512;
  std::vector<WordBox> words;
  std::uint64_t seed = 0;

  std::vector<RotatedRect> rects() const;
  PyramidConfig pyramid_config(const std::array<int, kNumLayers>& strides = kDefaultStrides,
                               double gamma = kDefaultGamma) const {
    return PyramidConfig{canvas_w, canvas_h, strides, gamma};
  }

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Throws InvalidSize / InconsistentLabel on a malformed scene.
void validate(const Scene& s);

}  // namespace seglink
