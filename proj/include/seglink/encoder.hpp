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
#include "seglink/scene.hpp"

namespace seglink {

struct EncoderConfig {
  /// Upper bound on max(a_l / h, h / a_l) for a default box to match a word.
  double max_size_ratio = 1.5;
};

/// max(a / h, h / a): how far a word height is from a default-box side.
double size_ratio(double a, double word_height);

/// Per-layer default-box labels and word matches (match -1 = negative).
struct BoxLabels {
  int l = 1;
  int w = 0;
  int h = 0;
  std::vector<std::uint8_t> seg_label;
  std::vector<int> match_id;

  friend bool operator==(const BoxLabels&, const BoxLabels&) = default;
};

/// A default box is positive iff its center is inside a word's rotated
/// rectangle and the size ratio passes. Ties between words go to the
/// smallest ratio, then the lowest id.
std::vector<BoxLabels> label_default_boxes(std::span<const WordBox> words, const LayerPyramid& p,
                                           const EncoderConfig& cfg = {});

/// Portion of the word covered by the default box: rotate the word flat
/// about the box center, clip its horizontal extent to the box width, and
/// rotate back. Throws InconsistentLabel when the clip is empty.
RotatedRect groundtruth_segment(const RotatedRect& default_box, const WordBox& word);

/// Inverse of decode_segment. Throws InvalidSegment on a non-positive
/// segment width or height.
Offsets encode_offsets(const RotatedRect& segment, const RotatedRect& default_box);

struct LinkLabels {
  int l = 1;
  std::vector<std::uint8_t> within;  ///< 8 per cell
  std::vector<std::uint8_t> cross;   ///< 4 per cell, empty on layer 1
};

/// A link is positive iff both endpoints are positive and matched to the
/// same word. Slots that fall off the map are negative.
std::vector<LinkLabels> label_links(std::span<const BoxLabels> labels, const LayerPyramid& p);

/// Full groundtruth for one image. Rows are processed in parallel; the
/// result does not depend on the thread count.
GroundTruthMaps encode(std::span<const WordBox> words, const LayerPyramid& p,
                       const EncoderConfig& cfg = {});

/// Single-threaded word-major reference used to check encode().
GroundTruthMaps encode_serial(std::span<const WordBox> words, const LayerPyramid& p,
                              const EncoderConfig& cfg = {});

}  // namespace seglink
