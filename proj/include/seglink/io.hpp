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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "seglink/evalproto.hpp"
#include "seglink/maps.hpp"
#include "seglink/scene.hpp"
#include "seglink/trainer.hpp"

namespace seglink::io {

// Scene files are JSON:
//   {"format": "seglink-scenes", "version": 1,
//    "pyramid": {"strides": [8, ...], "gamma": 1.5},
//    "scenes": [{"canvas": [w, h], "seed": s,
//                "words": [{"id": i, "x": .., "y": .., "w": .., "h": .., "theta": ..}]}]}
// Angles are radians. A word may give "quad": [x1, y1, ..., x4, y4] instead
// of x/y/w/h/theta; it is converted to its minimum-area rectangle on read
// with the width along the first edge. Detections use the same layout.
struct SceneSet {
  std::vector<Scene> scenes;
  std::array<int, kNumLayers> strides = kDefaultStrides;
  double gamma = kDefaultGamma;
};

void write_scene_set(std::ostream& out, const SceneSet& set);
/// `strict` applies validate(Scene) to every scene; detection files are
/// read with strict = false.
SceneSet read_scene_set(std::istream& in, bool strict = true);
void save_scene_set(const std::filesystem::path& path, const SceneSet& set);
SceneSet load_scene_set(const std::filesystem::path& path, bool strict = true);

// Tensor map files (little-endian):
//   "SLPM" | u32 version | u32 input_w | u32 input_h | 6 x u32 stride | f64 gamma
//   then 6 layer blocks: u32 layer | u32 w_l | u32 h_l | u32 channels |
//   w_l * h_l * channels x f32, ordered y, then x, then channel.
inline constexpr std::uint32_t kMapVersion = 1;

struct MapFile {
  PyramidConfig pyramid;
  ChannelStack maps;
};

/// Values are stored as 32-bit floats; anything already float-representable
/// survives a write/read bit-exactly.
void write_maps(std::ostream& out, const PyramidConfig& pyramid, const ChannelStack& maps);
MapFile read_maps(std::istream& in);
void save_maps(const std::filesystem::path& path, const PyramidConfig& pyramid,
               const ChannelStack& maps);
MapFile load_maps(const std::filesystem::path& path);

// Predictor files (little-endian):
//   "SLTP" | u32 version | u32 layer count |
//   per layer: u32 layer | u32 feature_dim | u32 channels |
//              feature_dim * channels x f64 weights (row-major) | channels x f64 bias
inline constexpr std::uint32_t kPredictorVersion = 1;

void write_predictor(std::ostream& out, const ToyPredictor& model);
ToyPredictor read_predictor(std::istream& in);
void save_predictor(const std::filesystem::path& path, const ToyPredictor& model);
ToyPredictor load_predictor(const std::filesystem::path& path);

/// One JSON object per line: per-image records, then one aggregate record.
std::string report_record(const EvalReport& r, int image);
std::string aggregate_record(const EvalReport& r);

/// Sorted list of *.slpm files when `path` is a directory, else {path}.
std::vector<std::filesystem::path> map_paths(const std::filesystem::path& path);

}  // namespace seglink::io
