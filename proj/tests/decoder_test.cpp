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
#include <limits>

#include "oracles.hpp"
#include "seglink/decoder.hpp"
#include "seglink/errors.hpp"
#include "seglink/synth.hpp"

namespace seglink {
namespace {

PredictionMaps blank(const LayerPyramid& p) { return PredictionMaps(ChannelStack::zeros(p)); }

TEST(Decoder, DecodeSegmentExamples) {
  const RotatedRect d(6, 6, 12, 12, 0);
  EXPECT_EQ(decode_segment({0, 0, 0, 0, 0}, d), d);
  EXPECT_DOUBLE_EQ(decode_segment({0.5, 0, 0, 0, 0}, d).x, 12.0);
  EXPECT_NEAR(decode_segment({0, 0, std::log(2.0), 0, 0}, d).w, 24.0, 1e-12);
  EXPECT_THROW(decode_segment({std::numeric_limits<double>::infinity(), 0, 0, 0, 0}, d),
               InvalidPrediction);
  EXPECT_THROW(decode_segment({0, 0, 0, std::nan(""), 0}, d), InvalidPrediction);
}

TEST(Decoder, EmptyMapsGiveEmptyGraph) {
  const LayerPyramid p = build_pyramid(256, 256);
  const SegmentGraph g = build_graph(blank(p), p, 0.5, 0.5);
  EXPECT_TRUE(g.nodes.empty());
  EXPECT_TRUE(g.edges.empty());
  EXPECT_TRUE(detect(blank(p), p, 0.5, 0.5).empty());
}

TEST(Decoder, TwoLinkedCells) {
  const LayerPyramid p = build_pyramid(256, 256);
  PredictionMaps m = blank(p);
  LayerTensor& t = m.layer(1);
  t.at(3, 3, channel::kSegPos) = 0.95;
  t.at(4, 3, channel::kSegPos) = 0.95;
  t.at(3, 3, channel::within_pos(4)) = 1.0;
  t.at(4, 3, channel::within_pos(3)) = 1.0;
  const SegmentGraph g = build_graph(m, p, 0.9, 0.7);
  ASSERT_EQ(g.nodes.size(), 2u);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].a, 0);
  EXPECT_EQ(g.edges[0].b, 1);
  EXPECT_EQ(g.edges[0].kind, LinkKind::kWithin);

  t.at(3, 3, channel::within_pos(4)) = 0.9;
  t.at(4, 3, channel::within_pos(3)) = 0.4;
  const SegmentGraph h = build_graph(m, p, 0.9, 0.7);
  EXPECT_EQ(h.nodes.size(), 2u);
  EXPECT_TRUE(h.edges.empty());
}

TEST(Decoder, CrossLinkFromCoarserCell) {
  const LayerPyramid p = build_pyramid(256, 256);
  PredictionMaps m = blank(p);
  m.layer(2).at(2, 2, channel::kSegPos) = 1.0;
  m.layer(1).at(5, 4, channel::kSegPos) = 1.0;  // slot 1 of (2,2,2)
  m.layer(2).at(2, 2, channel::cross_pos(1)) = 0.8;
  const SegmentGraph g = build_graph(m, p, 0.5, 0.5);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].kind, LinkKind::kCross);
  EXPECT_DOUBLE_EQ(g.edges[0].score, 0.8);
}

TEST(Decoder, ShapeMismatchThrows) {
  const LayerPyramid p = build_pyramid(256, 256);
  const PredictionMaps m = blank(build_pyramid(512, 256));
  EXPECT_THROW(build_graph(m, p, 0.5, 0.5), ShapeError);
  EXPECT_THROW(build_graph_serial(m, p, 0.5, 0.5), ShapeError);
}

TEST(Decoder, ParallelGraphMatchesSerial) {
  const NoiseSpec noise{0.01, 2.0, 0.1, 0.01};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene s = generate_scene(SceneConfig{}, seed);
    const LayerPyramid p = build_pyramid(s.pyramid_config());
    const PredictionMaps m = oracle_predictions(s, p, noise, seed);
    for (double a : {0.3, 0.7}) {
      EXPECT_TRUE(build_graph(m, p, a, 0.5) == build_graph_serial(m, p, a, 0.5));
    }
    const DetectionResult par = detect_full(m, p, 0.5, 0.5, true);
    const DetectionResult ser = detect_full(m, p, 0.5, 0.5, false);
    EXPECT_EQ(par.boxes, ser.boxes);
  }
}

TEST(Decoder, GraphIsMonotoneInThresholds) {
  const Scene s = generate_scene(SceneConfig{}, 5);
  const LayerPyramid p = build_pyramid(s.pyramid_config());
  const PredictionMaps m = oracle_predictions(s, p, NoiseSpec{0.02, 2.5, 0.0, 0.02}, 9);
  const auto key = [](const SegmentGraph& g) {
    std::vector<std::pair<GridIndex, GridIndex>> out;
    for (const SegmentEdge& e : g.edges) out.push_back({g.nodes[e.a].idx, g.nodes[e.b].idx});
    std::sort(out.begin(), out.end());
    return out;
  };
  for (double a = 0.1; a < 0.85; a += 0.1) {
    for (double b = 0.1; b < 0.85; b += 0.1) {
      const SegmentGraph lo = build_graph(m, p, a, b);
      for (const auto& hi : {build_graph(m, p, a + 0.1, b), build_graph(m, p, a, b + 0.1)}) {
        EXPECT_LE(hi.nodes.size(), lo.nodes.size());
        for (const SegmentNode& n : hi.nodes) {
          EXPECT_TRUE(std::any_of(lo.nodes.begin(), lo.nodes.end(),
                                  [&](const SegmentNode& o) { return o.idx == n.idx; }));
        }
        const auto lk = key(lo), hk = key(hi);
        EXPECT_TRUE(std::includes(lk.begin(), lk.end(), hk.begin(), hk.end()));
      }
    }
  }
}

TEST(Decoder, ComponentsExamples) {
  SegmentGraph g;
  g.nodes.resize(4);
  const auto singles = connected_components(g);
  ASSERT_EQ(singles.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(singles[i], std::vector<int>{i});
  g.nodes.resize(3);
  g.edges = {{0, 1, 1.0, LinkKind::kWithin}, {1, 2, 1.0, LinkKind::kCross}};
  const auto path = connected_components(g);
  ASSERT_EQ(path.size(), 1u);
  EXPECT_EQ(path[0], (std::vector<int>{0, 1, 2}));
}

TEST(Decoder, CombineExamples) {
  const RotatedRect one(3, 4, 10, 5, 0.2);
  const std::vector<RotatedRect> single = {one};
  const RotatedRect got1 = combine_segments(single);
  EXPECT_NEAR(got1.x, one.x, 1e-12);
  EXPECT_NEAR(got1.y, one.y, 1e-12);
  EXPECT_NEAR(got1.w, one.w, 1e-12);
  EXPECT_NEAR(got1.h, one.h, 1e-12);
  EXPECT_NEAR(got1.theta, one.theta, 1e-12);

  const std::vector<RotatedRect> two = {{10, 10, 10, 8, 0}, {20, 10, 10, 8, 0}};
  const RotatedRect got2 = combine_segments(two);
  EXPECT_NEAR(got2.x, 15, 1e-12);
  EXPECT_NEAR(got2.y, 10, 1e-12);
  EXPECT_NEAR(got2.w, 20, 1e-12);
  EXPECT_NEAR(got2.h, 8, 1e-12);
  EXPECT_NEAR(got2.theta, 0, 1e-12);

  EXPECT_THROW(combine_segments(std::span<const RotatedRect>{}), InvalidSegment);
}

TEST(Decoder, CombineCollinear) {
  const double th = 0.35;
  std::vector<RotatedRect> segs;
  for (double t : {-40.0, 5.0, 30.0}) {
    segs.emplace_back(100 + t * std::cos(th), 80 + t * std::sin(th), 12, 9, th);
  }
  const RotatedRect b = combine_segments(segs);
  EXPECT_NEAR(b.theta, th, 1e-12);
  EXPECT_NEAR(b.h, 9, 1e-12);
  EXPECT_TRUE(oracle::inside(b, segs.front().x, segs.front().y));
  EXPECT_TRUE(oracle::inside(b, segs.back().x, segs.back().y));
}

TEST(Decoder, CombinedWidthCoversWidestSegment) {
  const std::vector<RotatedRect> segs = {{10, 5, 4, 6, 0}, {14, 5, 30, 6, 0}, {40, 5, 8, 6, 0}};
  EXPECT_GE(combine_segments(segs).w, 30.0);
}

TEST(Decoder, AngleWrapFlag) {
  const std::vector<RotatedRect> wrap = {{0, 0, 10, 4, kPi / 2 - 0.05}, {0, 10, 10, 4, -kPi / 2 + 0.05}};
  const std::vector<RotatedRect> flat = {{0, 0, 10, 4, 0.1}, {10, 0, 10, 4, 0.2}};
  EXPECT_TRUE(angle_wraps(wrap));
  EXPECT_FALSE(angle_wraps(flat));
}

TEST(Decoder, SingleWordRoundtrip) {
  Scene s;
  s.words = {{RotatedRect(260, 240, 220, 28, 0.3), 0}};
  const LayerPyramid p = build_pyramid(s.pyramid_config());
  const auto dets = detect(oracle_predictions(s, p), p, 0.5, 0.5);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_GE(rotated_iou(dets[0], s.words[0].rect), 0.8);
}

}  // namespace
}  // namespace seglink
