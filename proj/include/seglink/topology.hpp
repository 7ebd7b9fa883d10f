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
#include <optional>
#include <utility>
#include <vector>

#include "seglink/geometry.hpp"

namespace seglink {

inline constexpr int kNumLayers = 6;
inline constexpr int kSizeQuantum = 128;
inline constexpr double kDefaultGamma = 1.5;

/// Default strides of the six feature layers, finest first.
inline constexpr std::array<int, kNumLayers> kDefaultStrides = {8, 16, 32, 64, 128, 256};

struct PyramidConfig {
  int input_w = 512;
  int input_h = 512;
  std::array<int, kNumLayers> strides = kDefaultStrides;
  double gamma = kDefaultGamma;

  friend bool operator==(const PyramidConfig&, const PyramidConfig&) = default;
};

/// One feature layer. `l` is 1-based (1 = finest).
struct LayerSpec {
  int l = 1;
  int w = 0;
  int h = 0;
  int stride = 0;
  double a = 0.0;  ///< default-box side in pixels

  int cells() const { return w * h; }
};

/// Cell address on the pyramid; `l` is 1-based.
struct GridIndex {
  int l = 1;
  int x = 0;
  int y = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

/// Immutable after construction; build with build_pyramid().
class LayerPyramid {
 public:
  LayerPyramid() = default;

  int input_w() const { return config_.input_w; }
  int input_h() const { return config_.input_h; }
  const PyramidConfig& config() const { return config_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  const LayerSpec& layer(int l) const { return layers_.at(static_cast<size_t>(l - 1)); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  bool valid(GridIndex idx) const;
  size_t total_cells() const;

 private:
  friend LayerPyramid build_pyramid(const PyramidConfig& config);
  PyramidConfig config_;
  std::vector<LayerSpec> layers_;
};

/// Rounds each dimension to the nearest multiple of 128, ties upward.
/// Throws InvalidSize for a dimension below 64.
std::pair<int, int> nearest_valid_size(int w, int h);

/// Throws InvalidSize unless the input is a multiple of 128 and of every
/// stride, and the strides double from layer to layer.
LayerPyramid build_pyramid(const PyramidConfig& config);
LayerPyramid build_pyramid(int input_w, int input_h,
                           const std::array<int, kNumLayers>& strides = kDefaultStrides,
                           double gamma = kDefaultGamma);

/// Square, axis-aligned default box of side a_l at the cell center.
RotatedRect default_box(const LayerPyramid& p, GridIndex idx);

// Link slot order. Within-layer slots run row-major over (dy, dx) skipping
// the center; cross-layer slots over (dy', dx') in {0,1}^2. Channel layouts
// in the map files follow the same order.
struct Offset {
  int dy;
  int dx;
};
inline constexpr int kWithinSlots = 8;
inline constexpr int kCrossSlots = 4;
inline constexpr std::array<Offset, kWithinSlots> kWithinOffsets = {
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
inline constexpr std::array<Offset, kCrossSlots> kCrossOffsets = {
    {{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

/// Slot of the reverse link: the neighbor's slot pointing back at us.
constexpr int opposite_within_slot(int slot) { return kWithinSlots - 1 - slot; }

/// Neighbor behind a within-layer slot, or nullopt when it falls off the map.
std::optional<GridIndex> within_neighbor(GridIndex idx, const LayerSpec& spec, int slot);

GridIndex cross_neighbor(GridIndex idx, int slot);

/// In-bounds 8-connected neighbors, in slot order.
std::vector<GridIndex> within_layer_neighbors(GridIndex idx, const LayerSpec& spec);

/// The 4 cells on layer l-1 covered by idx. Throws NoPrecedingLayer on l = 1.
std::array<GridIndex, kCrossSlots> cross_layer_neighbors(GridIndex idx, const LayerPyramid& p);

}  // namespace seglink
