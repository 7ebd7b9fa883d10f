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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "seglink/evalproto.hpp"
#include "seglink/synth.hpp"

namespace seglink {
namespace {

TEST(EvalProto, PerfectDetections) {
  const std::vector<RotatedRect> gts = {{50, 50, 40, 10, 0}, {150, 80, 60, 12, 0.3}};
  const EvalReport r = match_and_score(gts, gts);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f_measure, 1.0);
  EXPECT_EQ(r.matches.size(), 2u);
}

TEST(EvalProto, NoDetections) {
  const std::vector<RotatedRect> gts = {{50, 50, 40, 10, 0}};
  const EvalReport r = match_and_score({}, gts);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f_measure, 0.0);
  EXPECT_EQ(r.false_negatives, 1);
}

TEST(EvalProto, OneToOneMatching) {
  const std::vector<RotatedRect> gts = {{50, 50, 40, 10, 0}};
  const std::vector<RotatedRect> dets = {{51, 50, 40, 10, 0}, {49, 50, 40, 10, 0}};
  const EvalReport r = match_and_score(dets, gts);
  EXPECT_EQ(r.true_positives, 1);
  EXPECT_EQ(r.false_positives, 1);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0].det, 0);  // equal IoU, lower detection index wins
}

TEST(EvalProto, CountingIdentities) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(20, 80), s(5, 30), t(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    std::vector<RotatedRect> dets, gts;
    for (int k = 0, n = static_cast<int>(rng() % 10); k < n; ++k) dets.emplace_back(c(rng), c(rng), s(rng), s(rng), t(rng));
    for (int k = 0, n = static_cast<int>(rng() % 10); k < n; ++k) gts.emplace_back(c(rng), c(rng), s(rng), s(rng), t(rng));
    const EvalReport r = match_and_score(dets, gts);
    EXPECT_EQ(r.true_positives + r.false_positives, static_cast<int>(dets.size()));
    EXPECT_EQ(r.true_positives + r.false_negatives, static_cast<int>(gts.size()));
    const double f = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    EXPECT_NEAR(r.f_measure, f, 1e-15);
    for (const Match& m : r.matches) EXPECT_GE(m.iou, 0.5);
    const EvalReport again = match_and_score(dets, gts);
    EXPECT_EQ(again.true_positives, r.true_positives);
  }
}

TEST(EvalProto, AggregateSumsCounts) {
  const std::vector<EvalReport> per = {report_from_counts(3, 1, 0), report_from_counts(1, 0, 2)};
  const EvalReport a = aggregate(per);
  EXPECT_EQ(a.true_positives, 4);
  EXPECT_EQ(a.false_positives, 1);
  EXPECT_EQ(a.false_negatives, 2);
  EXPECT_DOUBLE_EQ(a.precision, 0.8);
  EXPECT_DOUBLE_EQ(a.recall, 4.0 / 6.0);
}

std::vector<ValidationImage> noisy_set(int n) {
  std::vector<ValidationImage> out;
  for (int i = 0; i < n; ++i) {
    const Scene s = generate_scene(SceneConfig{}, 700 + static_cast<std::uint64_t>(i));
    const LayerPyramid p = build_pyramid(s.pyramid_config());
    out.push_back({oracle_predictions(s, p, NoiseSpec{0.002, 2.0, 0.05, 0.002}, i), p, s.rects()});
  }
  return out;
}

TEST(EvalProto, GridSearchIsArgmax) {
  const auto images = noisy_set(10);
  const GridSearchResult r = grid_search_thresholds(images);
  ASSERT_EQ(r.grid.size(), 81u);
  for (const GridPoint& g : r.grid) {
    EXPECT_GE(r.report.f_measure, g.report.f_measure);
    if (g.report.f_measure == r.report.f_measure) {
      EXPECT_TRUE(g.alpha < r.alpha - 1e-12 ||
                  (std::abs(g.alpha - r.alpha) < 1e-12 && g.beta <= r.beta + 1e-12));
    }
  }
  EXPECT_EQ(r.report.f_measure, evaluate_at(images, r.alpha, r.beta).f_measure);
}

TEST(EvalProto, GridSearchIgnoresOrder) {
  auto images = noisy_set(8);
  const GridSearchResult a = grid_search_thresholds(images);
  std::reverse(images.begin(), images.end());
  const GridSearchResult b = grid_search_thresholds(images);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.report.f_measure, b.report.f_measure);
}

TEST(EvalProto, NoiseFreePlateau) {
  std::vector<ValidationImage> images;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Scene s = generate_scene(SceneConfig{}, 800 + i);
    const LayerPyramid p = build_pyramid(s.pyramid_config());
    images.push_back({oracle_predictions(s, p), p, s.rects()});
  }
  const GridSearchResult r = grid_search_thresholds(images);
  const auto plateau = std::count_if(r.grid.begin(), r.grid.end(), [&](const GridPoint& g) {
    return g.report.f_measure == r.report.f_measure;
  });
  EXPECT_EQ(plateau, 81);
  EXPECT_DOUBLE_EQ(r.alpha, 0.9);
  EXPECT_DOUBLE_EQ(r.beta, 0.9);
}

}  // namespace
}  // namespace seglink
