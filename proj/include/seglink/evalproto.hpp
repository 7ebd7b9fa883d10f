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

#include <span>
#include <vector>

#include "seglink/decoder.hpp"
#include "seglink/geometry.hpp"

namespace seglink {

inline constexpr double kDefaultIouThreshold = 0.5;

struct Match {
  int det = 0;
  int gt = 0;
  double iou = 0.0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::vector<Match> matches;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

/// Precision / recall / F from counts. P is 0 without detections, R is 0
/// without groundtruth, F is 0 when P + R = 0.
EvalReport report_from_counts(int tp, int fp, int fn);

/// Greedy one-to-one matching in descending IoU order (ties by detection,
/// then groundtruth index); pairs at or above the threshold are hits.
EvalReport match_and_score(std::span<const RotatedRect> dets, std::span<const RotatedRect> gts,
                           double iou_thresh = kDefaultIouThreshold);

/// Sums counts over images and recomputes the ratios.
EvalReport aggregate(std::span<const EvalReport> per_image);

struct ValidationImage {
  PredictionMaps maps;
  LayerPyramid pyramid;
  std::vector<RotatedRect> groundtruth;
};

struct GridPoint {
  double alpha = 0.0;
  double beta = 0.0;
  EvalReport report;
};

struct GridSearchResult {
  double alpha = 0.0;
  double beta = 0.0;
  EvalReport report;
  std::vector<GridPoint> grid;  ///< alpha-major over {step, 2 step, ..} below 1
};

/// Evaluates every (alpha, beta) on the grid {step, ..., 1 - step}^2 and
/// returns the F-maximizing pair; ties go to the higher alpha, then the
/// higher beta.
GridSearchResult grid_search_thresholds(std::span<const ValidationImage> images,
                                        double step = 0.1,
                                        double iou_thresh = kDefaultIouThreshold);

/// Aggregate report of detect() at fixed thresholds over a validation set.
EvalReport evaluate_at(std::span<const ValidationImage> images, double alpha, double beta,
                       double iou_thresh = kDefaultIouThreshold);

}  // namespace seglink
