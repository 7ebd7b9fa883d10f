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
#include <span>
#include <vector>

#include "seglink/maps.hpp"

namespace seglink {

/// Segment at a default box from its 5 regressed offsets. Throws
/// InvalidPrediction on non-finite input or output.
RotatedRect decode_segment(const Offsets& offsets, const RotatedRect& default_box);

struct SegmentNode {
  GridIndex idx;
  RotatedRect rect;
  double score = 0.0;

  friend bool operator==(const SegmentNode&, const SegmentNode&) = default;
};

enum class LinkKind : std::uint8_t { kWithin, kCross };

/// Undirected edge; a < b.
struct SegmentEdge {
  int a = 0;
  int b = 0;
  double score = 0.0;
  LinkKind kind = LinkKind::kWithin;

  friend bool operator==(const SegmentEdge&, const SegmentEdge&) = default;
};

/// Nodes are ordered by (layer, row, column); edges by their first
/// endpoint in that order.
struct SegmentGraph {
  std::vector<SegmentNode> nodes;
  std::vector<SegmentEdge> edges;

  friend bool operator==(const SegmentGraph&, const SegmentGraph&) = default;
};

/// Keeps segments scoring >= alpha and links scoring >= beta between kept
/// segments. Within-layer links use the mean of the two directed scores;
/// cross-layer links are directed from the coarser cell. Throws ShapeError
/// when the maps do not fit the pyramid.
SegmentGraph build_graph(const PredictionMaps& maps, const LayerPyramid& p, double alpha,
                         double beta);

/// Single-threaded reference for build_graph.
SegmentGraph build_graph_serial(const PredictionMaps& maps, const LayerPyramid& p, double alpha,
                                double beta);

/// Connected components as sorted node-index lists, ordered by their
/// smallest member. Iterative depth-first traversal.
std::vector<std::vector<int>> connected_components(const SegmentGraph& g);

/// Fuses one component into a word box: mean angle, a line through the
/// centroid of the segment centers along that angle, and the two extreme
/// projections plus half the widths of their segments. Output depends
/// only on the set of segments, not their order.
RotatedRect combine_segments(std::span<const RotatedRect> segments);

/// True when the component's angles straddle the +-pi/2 seam, where the
/// arithmetic angle mean is unreliable.
bool angle_wraps(std::span<const RotatedRect> segments);

struct DetectionResult {
  SegmentGraph graph;
  std::vector<std::vector<int>> components;
  std::vector<RotatedRect> boxes;  ///< one per component, same order
  std::vector<bool> wraps;         ///< angle_wraps() per component
};

DetectionResult detect_full(const PredictionMaps& maps, const LayerPyramid& p, double alpha,
                            double beta, bool parallel = true);

std::vector<RotatedRect> detect(const PredictionMaps& maps, const LayerPyramid& p, double alpha,
                                double beta);

}  // namespace seglink
