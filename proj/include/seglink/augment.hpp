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

#include <random>
#include <vector>

#include "seglink/scene.hpp"

namespace seglink {

struct AugmentConfig {
  /// Minimum Jaccard overlaps to draw from; 0 means unconstrained.
  std::vector<double> overlaps = {0.0, 0.1, 0.3, 0.5, 0.7, 0.9};
  double min_scale = 0.1;
  double max_scale = 1.0;
  int target_w = 512;
  int target_h = 512;
  int max_trials = 50;
  /// Text is never mirrored; kept as a field so configs can state it.
  bool flip = false;
};

/// Throws InvalidSize on an unusable configuration (flip enabled, scale
/// outside (0, 1], empty overlap set, target not a multiple of 128).
void validate(const AugmentConfig& cfg);

struct CropInfo {
  AlignedBox crop;
  double min_overlap = 0.0;
  int trials = 0;
  bool fell_back = false;
};

/// Maps the crop window onto a target_w x target_h canvas. Words whose
/// bounding-box center lies inside the crop are kept; their corners are
/// transformed and a rectangle is re-fitted, with the width axis following
/// the transformed text direction.
Scene apply_crop(const Scene& scene, const AlignedBox& crop, int target_w, int target_h);

/// Samples a minimum overlap and a crop whose side is a random fraction of
/// the canvas, retrying until some word's bounding box overlaps the crop
/// by at least that much; after max_trials the constraint is dropped.
Scene random_crop(const Scene& scene, const AugmentConfig& cfg, std::mt19937_64& rng,
                  CropInfo* info = nullptr);

}  // namespace seglink
