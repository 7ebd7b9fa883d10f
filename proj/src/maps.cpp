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

#include "seglink/maps.hpp"

#include <cmath>
#include <string>

#include "seglink/errors.hpp"

namespace seglink {

namespace {

bool same_offsets(const Offsets& a, const Offsets& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    const bool both_nan = std::isnan(a[i]) && std::isnan(b[i]);
    if (!both_nan && a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

Offsets LayerTensor::offsets(int x, int y) const {
  const size_t base = offset(x, y) + channel::kOffset;
  return {data[base], data[base + 1], data[base + 2], data[base + 3], data[base + 4]};
}

ChannelStack ChannelStack::zeros(const LayerPyramid& p) {
  ChannelStack s;
  for (const LayerSpec& spec : p.layers()) {
    s.layers.emplace_back(spec.l, spec.w, spec.h, channel::count(spec.l));
  }
  return s;
}

void ChannelStack::check_shape(const LayerPyramid& p) const {
  if (static_cast<int>(layers.size()) != p.num_layers()) {
    throw ShapeError("expected " + std::to_string(p.num_layers()) + " layers, got " +
                     std::to_string(layers.size()));
  }
  for (const LayerSpec& spec : p.layers()) {
    const LayerTensor& t = layer(spec.l);
    if (t.l != spec.l || t.w != spec.w || t.h != spec.h || t.c != channel::count(spec.l) ||
        t.data.size() != static_cast<size_t>(t.w) * t.h * t.c) {
      throw ShapeError("layer " + std::to_string(spec.l) + " has shape " + std::to_string(t.w) +
                       "x" + std::to_string(t.h) + "x" + std::to_string(t.c) + ", expected " +
                       std::to_string(spec.w) + "x" + std::to_string(spec.h) + "x" +
                       std::to_string(channel::count(spec.l)));
    }
  }
}

PredictionMaps to_probabilities(const LogitMaps& logits) {
  PredictionMaps out{ChannelStack(logits)};
  for (LayerTensor& t : out.layers) {
    const int pairs = 1 + kWithinSlots + (t.l == 1 ? 0 : kCrossSlots);
    for (size_t base = 0; base < t.data.size(); base += static_cast<size_t>(t.c)) {
      for (int k = 0; k < pairs; ++k) {
        const int neg = k == 0 ? channel::kSegNeg
                        : k <= kWithinSlots ? channel::within_neg(k - 1)
                                            : channel::cross_neg(k - 1 - kWithinSlots);
        double& zn = t.data[base + static_cast<size_t>(neg)];
        double& zp = t.data[base + static_cast<size_t>(neg) + 1];
        const double pos = 1.0 / (1.0 + std::exp(zn - zp));
        const double negp = 1.0 / (1.0 + std::exp(zp - zn));
        zn = negp;
        zp = pos;
      }
    }
  }
  return out;
}

bool operator==(const GroundTruthLayer& a, const GroundTruthLayer& b) {
  if (a.l != b.l || a.w != b.w || a.h != b.h || a.seg_label != b.seg_label ||
      a.match_id != b.match_id || a.within_link != b.within_link ||
      a.cross_link != b.cross_link || a.offsets.size() != b.offsets.size()) {
    return false;
  }
  for (size_t i = 0; i < a.offsets.size(); ++i) {
    if (!same_offsets(a.offsets[i], b.offsets[i])) return false;
  }
  return true;
}

size_t GroundTruthMaps::positive_segments() const {
  size_t n = 0;
  for (const auto& g : layers)
    for (auto v : g.seg_label) n += v;
  return n;
}

size_t GroundTruthMaps::positive_links() const {
  size_t n = 0;
  for (const auto& g : layers) {
    for (auto v : g.within_link) n += v;
    for (auto v : g.cross_link) n += v;
  }
  return n;
}

ChannelStack GroundTruthMaps::to_tensor() const {
  ChannelStack s;
  for (const GroundTruthLayer& g : layers) {
    LayerTensor t(g.l, g.w, g.h, channel::count(g.l));
    for (int y = 0; y < g.h; ++y) {
      for (int x = 0; x < g.w; ++x) {
        const size_t c = g.cell(x, y);
        const double label = g.seg_label[c];
        t.at(x, y, channel::kSegNeg) = 1.0 - label;
        t.at(x, y, channel::kSegPos) = label;
        if (g.seg_label[c]) {
          for (int k = 0; k < 5; ++k) t.at(x, y, channel::kOffset + k) = g.offsets[c][static_cast<size_t>(k)];
        }
        for (int k = 0; k < kWithinSlots; ++k) {
          const double v = g.within_link[c * kWithinSlots + static_cast<size_t>(k)];
          t.at(x, y, channel::within_neg(k)) = 1.0 - v;
          t.at(x, y, channel::within_pos(k)) = v;
        }
        if (g.l > 1) {
          for (int k = 0; k < kCrossSlots; ++k) {
            const double v = g.cross_link[c * kCrossSlots + static_cast<size_t>(k)];
            t.at(x, y, channel::cross_neg(k)) = 1.0 - v;
            t.at(x, y, channel::cross_pos(k)) = v;
          }
        }
      }
    }
    s.layers.push_back(std::move(t));
  }
  return s;
}

}  // namespace seglink
