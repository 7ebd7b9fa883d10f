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

#include "seglink/topology.hpp"

#include <cmath>
#include <string>

#include "seglink/errors.hpp"

namespace seglink {

namespace {

int round_to_quantum(int v) {
  if (v < kSizeQuantum / 2) {
    throw InvalidSize("dimension " + std::to_string(v) + " is below the minimum of 64");
  }
  return (v + kSizeQuantum / 2) / kSizeQuantum * kSizeQuantum;
}

}  // namespace

bool LayerPyramid::valid(GridIndex idx) const {
  if (idx.l < 1 || idx.l > num_layers()) return false;
  const LayerSpec& s = layer(idx.l);
  return idx.x >= 0 && idx.x < s.w && idx.y >= 0 && idx.y < s.h;
}

size_t LayerPyramid::total_cells() const {
  size_t n = 0;
  for (const auto& s : layers_) n += static_cast<size_t>(s.cells());
  return n;
}

std::pair<int, int> nearest_valid_size(int w, int h) {
  return {round_to_quantum(w), round_to_quantum(h)};
}

LayerPyramid build_pyramid(const PyramidConfig& config) {
  if (config.input_w <= 0 || config.input_h <= 0 || config.input_w % kSizeQuantum != 0 ||
      config.input_h % kSizeQuantum != 0) {
    throw InvalidSize("input size " + std::to_string(config.input_w) + "x" +
                      std::to_string(config.input_h) + " is not a multiple of 128");
  }
  if (!(config.gamma > 0.0) || !std::isfinite(config.gamma)) {
    throw InvalidSize("gamma must be positive");
  }
  LayerPyramid p;
  p.config_ = config;
  for (int i = 0; i < kNumLayers; ++i) {
    const int stride = config.strides[static_cast<size_t>(i)];
    if (stride <= 0 || (i > 0 && stride != 2 * config.strides[static_cast<size_t>(i - 1)])) {
      throw InvalidSize("layer strides must be positive and double from layer to layer");
    }
    if (config.input_w % stride != 0 || config.input_h % stride != 0) {
      throw InvalidSize("input size " + std::to_string(config.input_w) + "x" +
                        std::to_string(config.input_h) + " is not divisible by stride " +
                        std::to_string(stride));
    }
    LayerSpec s;
    s.l = i + 1;
    s.w = config.input_w / stride;
    s.h = config.input_h / stride;
    s.stride = stride;
    s.a = config.gamma * static_cast<double>(config.input_w) / static_cast<double>(s.w);
    p.layers_.push_back(s);
  }
  return p;
}

LayerPyramid build_pyramid(int input_w, int input_h, const std::array<int, kNumLayers>& strides,
                           double gamma) {
  return build_pyramid(PyramidConfig{input_w, input_h, strides, gamma});
}

RotatedRect default_box(const LayerPyramid& p, GridIndex idx) {
  if (!p.valid(idx)) {
    throw IndexError("grid index (" + std::to_string(idx.l) + ", " + std::to_string(idx.x) +
                     ", " + std::to_string(idx.y) + ") is outside the pyramid");
  }
  const LayerSpec& s = p.layer(idx.l);
  const double xa = static_cast<double>(p.input_w()) / s.w * (idx.x + 0.5);
  const double ya = static_cast<double>(p.input_h()) / s.h * (idx.y + 0.5);
  return RotatedRect(xa, ya, s.a, s.a, 0.0);
}

std::optional<GridIndex> within_neighbor(GridIndex idx, const LayerSpec& spec, int slot) {
  const Offset o = kWithinOffsets[static_cast<size_t>(slot)];
  const int nx = idx.x + o.dx;
  const int ny = idx.y + o.dy;
  if (nx < 0 || nx >= spec.w || ny < 0 || ny >= spec.h) return std::nullopt;
  return GridIndex{idx.l, nx, ny};
}

GridIndex cross_neighbor(GridIndex idx, int slot) {
  const Offset o = kCrossOffsets[static_cast<size_t>(slot)];
  return {idx.l - 1, 2 * idx.x + o.dx, 2 * idx.y + o.dy};
}

std::vector<GridIndex> within_layer_neighbors(GridIndex idx, const LayerSpec& spec) {
  std::vector<GridIndex> out;
  out.reserve(kWithinSlots);
  for (int k = 0; k < kWithinSlots; ++k) {
    if (auto n = within_neighbor(idx, spec, k)) out.push_back(*n);
  }
  return out;
}

std::array<GridIndex, kCrossSlots> cross_layer_neighbors(GridIndex idx, const LayerPyramid& p) {
  if (idx.l <= 1) {
    throw NoPrecedingLayer("layer 1 has no preceding layer for cross-layer links");
  }
  if (!p.valid(idx)) throw IndexError("grid index outside the pyramid");
  std::array<GridIndex, kCrossSlots> out;
  for (int k = 0; k < kCrossSlots; ++k) out[static_cast<size_t>(k)] = cross_neighbor(idx, k);
  return out;
}

}  // namespace seglink
