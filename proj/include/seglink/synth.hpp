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

#include "seglink/maps.hpp"
#include "seglink/scene.hpp"

namespace seglink {

struct SceneConfig {
  int canvas_w = 512;
  int canvas_h = 512;
  int min_words = 1;
  int max_words = 8;
  double min_height = 12.0;
  double max_height = 48.0;
  double min_aspect = 3.0;  ///< width / height
  double max_aspect = 8.0;
  double min_theta = -kPi / 4;
  double max_theta = kPi / 4;
  double min_separation = 0.0;  ///< minimum distance between word centers
  int retry_budget = 200;       ///< placement attempts per word
};

/// Rejection-samples non-overlapping words fully inside the canvas. Words
/// that cannot be placed within the retry budget are dropped.
Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed);

/// Two parallel words of equal size stacked along their height axis,
/// centered on the canvas, with `gap` pixels between their long edges.
Scene parallel_pair_scene(int canvas_w, int canvas_h, double word_w, double word_h, double theta,
                          double gap, std::uint64_t seed = 0);

struct NoiseSpec {
  double score_flip_rate = 0.0;  ///< probability of flipping a segment label
  double score_jitter = 0.0;     ///< stddev of Gaussian noise on score logits
  double offset_jitter = 0.0;    ///< half-width of uniform noise on dx, dy, dw, dh
  double link_flip_rate = 0.0;   ///< probability of flipping a link label

  bool is_zero() const {
    return score_flip_rate == 0.0 && score_jitter == 0.0 && offset_jitter == 0.0 &&
           link_flip_rate == 0.0;
  }
};

/// Throws InvalidPrediction on out-of-range rates or negative spreads.
void validate(const NoiseSpec& noise);

/// Magnitude of the logits standing in for hard {0,1} labels.
inline constexpr double kOracleLogit = 12.0;

/// Groundtruth maps rendered as logits: label 1 -> (-12, +12), label 0 ->
/// (+12, -12); offsets copied, zero on negatives.
LogitMaps oracle_logits(const Scene& scene, const LayerPyramid& p);

/// Encoded groundtruth as probabilities, optionally corrupted. With a zero
/// NoiseSpec the scores are exactly 0 or 1.
PredictionMaps oracle_predictions(const Scene& scene, const LayerPyramid& p,
                                  const NoiseSpec& noise = {}, std::uint64_t seed = 0);

}  // namespace seglink
