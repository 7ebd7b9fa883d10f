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

#include "seglink/augment.hpp"

#include <cmath>

#include "seglink/errors.hpp"

namespace seglink {

void validate(const AugmentConfig& cfg) {
  if (cfg.flip) throw InvalidSize("horizontal flipping is not supported for text");
  if (!(cfg.min_scale > 0.0) || !(cfg.max_scale <= 1.0) || cfg.min_scale > cfg.max_scale) {
    throw InvalidSize("crop scale range must lie within (0, 1]");
  }
  if (cfg.overlaps.empty()) throw InvalidSize("overlap choices must not be empty");
  if (cfg.target_w <= 0 || cfg.target_h <= 0 || cfg.target_w % kSizeQuantum != 0 ||
      cfg.target_h % kSizeQuantum != 0) {
    throw InvalidSize("crop target size must be a multiple of 128");
  }
  if (cfg.max_trials < 1) throw InvalidSize("max_trials must be positive");
}

Scene apply_crop(const Scene& scene, const AlignedBox& crop, int target_w, int target_h) {
  const double sx = target_w / crop.width();
  const double sy = target_h / crop.height();
  Scene out;
  out.canvas_w = target_w;
  out.canvas_h = target_h;
  out.seed = scene.seed;
  const auto map = [&](Point p) { return Point{(p.x - crop.xmin) * sx, (p.y - crop.ymin) * sy}; };
  for (const WordBox& word : scene.words) {
    if (!crop.contains(axis_aligned_bbox(word.rect).center())) continue;
    const Quad q = to_quad(word.rect);
    std::array<Point, 4> pts;
    for (size_t i = 0; i < 4; ++i) pts[i] = map(q.vertices[i]);
    const Point axis = word.rect.width_axis();
    out.words.push_back({min_area_rect(pts, Point{axis.x * sx, axis.y * sy}), word.id});
  }
  return out;
}

Scene random_crop(const Scene& scene, const AugmentConfig& cfg, std::mt19937_64& rng,
                  CropInfo* info) {
  validate(cfg);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick(0, cfg.overlaps.size() - 1);
  const double cw = scene.canvas_w;
  const double ch = scene.canvas_h;

  CropInfo ci;
  ci.min_overlap = cfg.overlaps[pick(rng)];
  for (int trial = 1;; ++trial) {
    const bool fallback = trial > cfg.max_trials;
    const double scale = cfg.min_scale + (cfg.max_scale - cfg.min_scale) * unit(rng);
    const double w = scale * cw;
    const double h = scale * ch;
    const double x0 = (cw - w) * unit(rng);
    const double y0 = (ch - h) * unit(rng);
    const AlignedBox crop{x0, y0, x0 + w, y0 + h};
    bool accepted = fallback || ci.min_overlap <= 0.0;
    for (size_t i = 0; !accepted && i < scene.words.size(); ++i) {
      accepted = jaccard(crop, axis_aligned_bbox(scene.words[i].rect)) >= ci.min_overlap;
    }
    if (accepted) {
      ci.crop = crop;
      ci.trials = trial;
      ci.fell_back = fallback;
      break;
    }
  }
  if (info) *info = ci;
  return apply_crop(scene, ci.crop, cfg.target_w, cfg.target_h);
}

}  // namespace seglink
