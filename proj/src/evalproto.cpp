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

#include "seglink/evalproto.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "seglink/errors.hpp"

namespace seglink {

EvalReport report_from_counts(int tp, int fp, int fn) {
  EvalReport r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.false_negatives = fn;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double s = r.precision + r.recall;
  r.f_measure = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

EvalReport match_and_score(std::span<const RotatedRect> dets, std::span<const RotatedRect> gts,
                           double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw InvalidPrediction("IoU threshold must lie in (0, 1)");
  }
  std::vector<Match> candidates;
  for (size_t d = 0; d < dets.size(); ++d) {
    for (size_t g = 0; g < gts.size(); ++g) {
      const double iou = rotated_iou(dets[d], gts[g]);
      if (iou >= iou_thresh) candidates.push_back({static_cast<int>(d), static_cast<int>(g), iou});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    return std::make_tuple(-a.iou, a.det, a.gt) < std::make_tuple(-b.iou, b.det, b.gt);
  });
  std::vector<bool> det_used(dets.size(), false), gt_used(gts.size(), false);
  std::vector<Match> matches;
  for (const Match& m : candidates) {
    if (det_used[static_cast<size_t>(m.det)] || gt_used[static_cast<size_t>(m.gt)]) continue;
    det_used[static_cast<size_t>(m.det)] = true;
    gt_used[static_cast<size_t>(m.gt)] = true;
    matches.push_back(m);
  }
  const int tp = static_cast<int>(matches.size());
  EvalReport r = report_from_counts(tp, static_cast<int>(dets.size()) - tp,
                                    static_cast<int>(gts.size()) - tp);
  r.matches = std::move(matches);
  return r;
}

EvalReport aggregate(std::span<const EvalReport> per_image) {
  int tp = 0, fp = 0, fn = 0;
  for (const auto& r : per_image) {
    tp += r.true_positives;
    fp += r.false_positives;
    fn += r.false_negatives;
  }
  return report_from_counts(tp, fp, fn);
}

EvalReport evaluate_at(std::span<const ValidationImage> images, double alpha, double beta,
                       double iou_thresh) {
  std::vector<EvalReport> reports;
  reports.reserve(images.size());
  for (const auto& img : images) {
    const auto dets = detect_full(img.maps, img.pyramid, alpha, beta, false).boxes;
    reports.push_back(match_and_score(dets, img.groundtruth, iou_thresh));
  }
  return aggregate(reports);
}

GridSearchResult grid_search_thresholds(std::span<const ValidationImage> images, double step,
                                        double iou_thresh) {
  if (images.empty()) throw InvalidPrediction("grid search needs a validation set");
  if (!(step > 0.0 && step < 1.0)) throw InvalidPrediction("grid step must lie in (0, 1)");
  // Rounded so 3 * 0.1 lands on 0.3 exactly.
  std::vector<double> values;
  for (int i = 1; i * step < 1.0 - 1e-9; ++i) values.push_back(std::round(i * step * 1e9) / 1e9);

  GridSearchResult result;
  result.grid.resize(values.size() * values.size());
  const int total = static_cast<int>(result.grid.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < total; ++k) {
    const double alpha = values[static_cast<size_t>(k) / values.size()];
    const double beta = values[static_cast<size_t>(k) % values.size()];
    result.grid[static_cast<size_t>(k)] = {alpha, beta,
                                           evaluate_at(images, alpha, beta, iou_thresh)};
  }
  const GridPoint* best = nullptr;
  for (const auto& g : result.grid) {
    if (!best || g.report.f_measure > best->report.f_measure ||
        (g.report.f_measure == best->report.f_measure &&
         std::tie(g.alpha, g.beta) > std::tie(best->alpha, best->beta))) {
      best = &g;
    }
  }
  result.alpha = best->alpha;
  result.beta = best->beta;
  result.report = best->report;
  return result;
}

}  // namespace seglink
