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

#include <span>
#include <string>

#include "seglink/decoder.hpp"
#include "seglink/scene.hpp"

namespace seglink {

/// SVG overlay of a scene: groundtruth words in gray, segments in blue,
/// within-layer links in red, cross-layer links in green, and combined
/// boxes in black. Null / empty arguments are skipped. Output is a pure
/// function of the inputs.
std::string render_svg(const Scene& scene, const SegmentGraph* graph = nullptr,
                       std::span<const RotatedRect> detections = {});

}  // namespace seglink
