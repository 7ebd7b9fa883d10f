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

#include <array>
#include <cstdint>
#include <vector>

#include "seglink/topology.hpp"

namespace seglink {

/// Predictor channel layout per cell:
///   [0, 2)   segment score (neg, pos)
///   [2, 7)   offsets (dx, dy, dw, dh, dtheta)
///   [7, 23)  within-layer links, 8 slots x (neg, pos)
///   [23, 31) cross-layer links, 4 slots x (neg, pos); absent on layer 1
namespace channel {
inline constexpr int kSegNeg = 0;
inline constexpr int kSegPos = 1;
inline constexpr int kOffset = 2;
inline constexpr int kWithin = 7;
inline constexpr int kCross = 23;
inline constexpr int kFull = 31;
inline constexpr int kFirstLayer = 23;

constexpr int count(int l) { return l == 1 ? kFirstLayer : kFull; }
constexpr int within_neg(int slot) { return kWithin + 2 * slot; }
constexpr int within_pos(int slot) { return kWithin + 2 * slot + 1; }
constexpr int cross_neg(int slot) { return kCross + 2 * slot; }
constexpr int cross_pos(int slot) { return kCross + 2 * slot + 1; }
}  // namespace channel

using Offsets = std::array<double, 5>;

/// Dense w x h x c map, stored y-major, then x, then channel.
struct LayerTensor {
  int l = 1;
  int w = 0;
  int h = 0;
  int c = 0;
  std::vector<double> data;

  LayerTensor() = default;
  LayerTensor(int layer, int width, int height, int channels)
      : l(layer), w(width), h(height), c(channels),
        data(static_cast<size_t>(width) * height * channels, 0.0) {}

  size_t offset(int x, int y) const { return (static_cast<size_t>(y) * w + x) * c; }
  double& at(int x, int y, int ch) { return data[offset(x, y) + static_cast<size_t>(ch)]; }
  double at(int x, int y, int ch) const { return data[offset(x, y) + static_cast<size_t>(ch)]; }
  Offsets offsets(int x, int y) const;

  friend bool operator==(const LayerTensor&, const LayerTensor&) = default;
};

/// One tensor per pyramid layer, shaped by the channel layout above.
struct ChannelStack {
  std::vector<LayerTensor> layers;

  static ChannelStack zeros(const LayerPyramid& p);

  /// Throws ShapeError unless layer count, map sizes and channel counts
  /// match the pyramid.
  void check_shape(const LayerPyramid& p) const;
  const LayerTensor& layer(int l) const { return layers.at(static_cast<size_t>(l - 1)); }
  LayerTensor& layer(int l) { return layers.at(static_cast<size_t>(l - 1)); }

  friend bool operator==(const ChannelStack&, const ChannelStack&) = default;
};

/// Post-softmax scores plus raw offsets; what the decoder consumes.
struct PredictionMaps : ChannelStack {
  PredictionMaps() = default;
  explicit PredictionMaps(ChannelStack s) : ChannelStack(std::move(s)) {}

  double seg_score(GridIndex i) const { return layer(i.l).at(i.x, i.y, channel::kSegPos); }
  double within_score(GridIndex i, int slot) const {
    return layer(i.l).at(i.x, i.y, channel::within_pos(slot));
  }
  double cross_score(GridIndex i, int slot) const {
    return layer(i.l).at(i.x, i.y, channel::cross_pos(slot));
  }
};

/// Raw predictor outputs (score channels are logits); what the loss consumes.
struct LogitMaps : ChannelStack {
  LogitMaps() = default;
  explicit LogitMaps(ChannelStack s) : ChannelStack(std::move(s)) {}
};

/// Softmax over each (neg, pos) pair; offsets pass through.
PredictionMaps to_probabilities(const LogitMaps& logits);

/// Training targets for one layer. Offsets are NaN where seg_label is 0.
struct GroundTruthLayer {
  int l = 1;
  int w = 0;
  int h = 0;
  std::vector<std::uint8_t> seg_label;
  std::vector<int> match_id;            ///< -1 for negatives
  std::vector<Offsets> offsets;
  std::vector<std::uint8_t> within_link;  ///< 8 per cell
  std::vector<std::uint8_t> cross_link;   ///< 4 per cell, empty on layer 1

  size_t cell(int x, int y) const { return static_cast<size_t>(y) * w + x; }

  friend bool operator==(const GroundTruthLayer& a, const GroundTruthLayer& b);
};

struct GroundTruthMaps {
  std::vector<GroundTruthLayer> layers;

  const GroundTruthLayer& layer(int l) const { return layers.at(static_cast<size_t>(l - 1)); }
  size_t positive_segments() const;
  size_t positive_links() const;

  /// Tensor view with labels as {0,1} in the score channels and offsets
  /// zeroed on negative cells.
  ChannelStack to_tensor() const;

  friend bool operator==(const GroundTruthMaps&, const GroundTruthMaps&) = default;
};

}  // namespace seglink
