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

#include "seglink/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seglink/errors.hpp"

namespace seglink::io {

namespace {

using nlohmann::json;

constexpr char kSceneFormat[] = "seglink-scenes";
constexpr std::uint32_t kSceneVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(std::ostream& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("unexpected end of file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  const std::uint64_t hi = get_u32(in);
  return lo | (hi << 32);
}

double get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void expect_magic(std::istream& in, const char* magic) {
  char m[4];
  if (!in.read(m, 4) || std::memcmp(m, magic, 4) != 0) {
    throw FormatError(std::string("missing ") + magic + " header");
  }
}

json word_to_json(const WordBox& w) {
  return {{"id", w.id}, {"x", w.rect.x}, {"y", w.rect.y}, {"w", w.rect.w}, {"h", w.rect.h},
          {"theta", w.rect.theta}};
}

WordBox word_from_json(const json& j) {
  WordBox w;
  w.id = j.at("id").get<int>();
  if (j.contains("quad")) {
    const auto q = j.at("quad").get<std::vector<double>>();
    if (q.size() != 8) throw FormatError("a quad needs 8 coordinates");
    std::array<Point, 4> pts;
    for (size_t i = 0; i < 4; ++i) pts[i] = {q[2 * i], q[2 * i + 1]};
    w.rect = min_area_rect(pts, pts[1] - pts[0]);
  } else {
    w.rect = RotatedRect(j.at("x").get<double>(), j.at("y").get<double>(), j.at("w").get<double>(),
                         j.at("h").get<double>(), j.at("theta").get<double>());
  }
  return w;
}

void check_stream(const std::ios& s, const std::filesystem::path& path) {
  if (!s) throw FormatError("cannot access " + path.string());
}

}  // namespace

void write_scene_set(std::ostream& out, const SceneSet& set) {
  json doc;
  doc["format"] = kSceneFormat;
  doc["version"] = kSceneVersion;
  doc["pyramid"] = {{"strides", set.strides}, {"gamma", set.gamma}};
  json scenes = json::array();
  for (const Scene& s : set.scenes) {
    json words = json::array();
    for (const WordBox& w : s.words) words.push_back(word_to_json(w));
    scenes.push_back({{"canvas", {s.canvas_w, s.canvas_h}}, {"seed", s.seed}, {"words", words}});
  }
  doc["scenes"] = std::move(scenes);
  out << doc.dump(1) << '\n';
}

SceneSet read_scene_set(std::istream& in, bool strict) {
  SceneSet set;
  try {
    const json doc = json::parse(in);
    if (doc.value("format", std::string()) != kSceneFormat) {
      throw FormatError("not a seglink scene file");
    }
    if (doc.value("version", 0u) != kSceneVersion) throw FormatError("unsupported scene file version");
    if (doc.contains("pyramid")) {
      set.strides = doc["pyramid"].value("strides", kDefaultStrides);
      set.gamma = doc["pyramid"].value("gamma", kDefaultGamma);
    }
    for (const json& js : doc.at("scenes")) {
      Scene s;
      const auto canvas = js.at("canvas").get<std::array<int, 2>>();
      s.canvas_w = canvas[0];
      s.canvas_h = canvas[1];
      s.seed = js.value("seed", std::uint64_t{0});
      for (const json& jw : js.at("words")) s.words.push_back(word_from_json(jw));
      if (strict) validate(s);
      set.scenes.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed scene file: ") + e.what());
  }
  return set;
}

void save_scene_set(const std::filesystem::path& path, const SceneSet& set) {
  std::ofstream out(path);
  check_stream(out, path);
  write_scene_set(out, set);
}

SceneSet load_scene_set(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  check_stream(in, path);
  return read_scene_set(in, strict);
}

void write_maps(std::ostream& out, const PyramidConfig& pyramid, const ChannelStack& maps) {
  maps.check_shape(build_pyramid(pyramid));
  out.write("SLPM", 4);
  put_u32(out, kMapVersion);
  put_u32(out, static_cast<std::uint32_t>(pyramid.input_w));
  put_u32(out, static_cast<std::uint32_t>(pyramid.input_h));
  for (int s : pyramid.strides) put_u32(out, static_cast<std::uint32_t>(s));
  put_f64(out, pyramid.gamma);
  for (const LayerTensor& t : maps.layers) {
    put_u32(out, static_cast<std::uint32_t>(t.l));
    put_u32(out, static_cast<std::uint32_t>(t.w));
    put_u32(out, static_cast<std::uint32_t>(t.h));
    put_u32(out, static_cast<std::uint32_t>(t.c));
    for (double v : t.data) put_f32(out, v);
  }
}

MapFile read_maps(std::istream& in) {
  expect_magic(in, "SLPM");
  if (get_u32(in) != kMapVersion) throw FormatError("unsupported map file version");
  MapFile f;
  f.pyramid.input_w = static_cast<int>(get_u32(in));
  f.pyramid.input_h = static_cast<int>(get_u32(in));
  for (int& s : f.pyramid.strides) s = static_cast<int>(get_u32(in));
  f.pyramid.gamma = get_f64(in);
  const LayerPyramid p = build_pyramid(f.pyramid);
  for (const LayerSpec& spec : p.layers()) {
    const int l = static_cast<int>(get_u32(in));
    const int w = static_cast<int>(get_u32(in));
    const int h = static_cast<int>(get_u32(in));
    const int c = static_cast<int>(get_u32(in));
    if (l != spec.l || w != spec.w || h != spec.h || c != channel::count(spec.l)) {
      throw ShapeError("map layer block " + std::to_string(spec.l) +
                       " does not match the pyramid in the header");
    }
    LayerTensor t(l, w, h, c);
    for (double& v : t.data) v = get_f32(in);
    f.maps.layers.push_back(std::move(t));
  }
  return f;
}

void save_maps(const std::filesystem::path& path, const PyramidConfig& pyramid,
               const ChannelStack& maps) {
  std::ofstream out(path, std::ios::binary);
  check_stream(out, path);
  write_maps(out, pyramid, maps);
}

MapFile load_maps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check_stream(in, path);
  return read_maps(in);
}

void write_predictor(std::ostream& out, const ToyPredictor& model) {
  out.write("SLTP", 4);
  put_u32(out, kPredictorVersion);
  put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
  for (const LayerParams& lp : model.layers) {
    put_u32(out, static_cast<std::uint32_t>(lp.l));
    put_u32(out, static_cast<std::uint32_t>(kFeatureDim));
    put_u32(out, static_cast<std::uint32_t>(lp.channels));
    for (double v : lp.weight) put_f64(out, v);
    for (double v : lp.bias) put_f64(out, v);
  }
}

ToyPredictor read_predictor(std::istream& in) {
  expect_magic(in, "SLTP");
  if (get_u32(in) != kPredictorVersion) throw FormatError("unsupported predictor version");
  const std::uint32_t layers = get_u32(in);
  if (layers != kNumLayers) throw ShapeError("predictor must have 6 layers");
  ToyPredictor m;
  for (std::uint32_t i = 0; i < layers; ++i) {
    LayerParams lp;
    lp.l = static_cast<int>(get_u32(in));
    const std::uint32_t features = get_u32(in);
    lp.channels = static_cast<int>(get_u32(in));
    if (lp.l != static_cast<int>(i) + 1 || features != kFeatureDim ||
        lp.channels != channel::count(lp.l)) {
      throw ShapeError("predictor layer " + std::to_string(i + 1) + " has unexpected dimensions");
    }
    lp.weight.resize(static_cast<size_t>(kFeatureDim * lp.channels));
    lp.bias.resize(static_cast<size_t>(lp.channels));
    for (double& v : lp.weight) v = get_f64(in);
    for (double& v : lp.bias) v = get_f64(in);
    m.layers.push_back(std::move(lp));
  }
  return m;
}

void save_predictor(const std::filesystem::path& path, const ToyPredictor& model) {
  std::ofstream out(path, std::ios::binary);
  check_stream(out, path);
  write_predictor(out, model);
}

ToyPredictor load_predictor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  check_stream(in, path);
  return read_predictor(in);
}

std::string report_record(const EvalReport& r, int image) {
  json j = {{"image", image},         {"precision", r.precision},
            {"recall", r.recall},     {"f_measure", r.f_measure},
            {"tp", r.true_positives}, {"fp", r.false_positives},
            {"fn", r.false_negatives}};
  json matches = json::array();
  for (const Match& m : r.matches) matches.push_back({m.det, m.gt, m.iou});
  j["matches"] = std::move(matches);
  return j.dump();
}

std::string aggregate_record(const EvalReport& r) {
  return json{{"aggregate", true},         {"precision", r.precision},
              {"recall", r.recall},        {"f_measure", r.f_measure},
              {"tp", r.true_positives},    {"fp", r.false_positives},
              {"fn", r.false_negatives}}
      .dump();
}

std::vector<std::filesystem::path> map_paths(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return {path};
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".slpm") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace seglink::io
