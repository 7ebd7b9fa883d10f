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

// Serial reference vs OpenMP kernels on a dense 1280x768 scene.
#include <benchmark/benchmark.h>

#include "seglink/decoder.hpp"
#include "seglink/encoder.hpp"
#include "seglink/synth.hpp"
#include "seglink/trainer.hpp"

namespace {

using namespace seglink;

struct Fixture {
  Scene scene;
  LayerPyramid pyramid;
  PredictionMaps maps;

  Fixture() {
    SceneConfig cfg;
    cfg.canvas_w = 1280;
    cfg.canvas_h = 768;
    cfg.min_words = cfg.max_words = 30;
    scene = generate_scene(cfg, 77);
    pyramid = build_pyramid(scene.pyramid_config());
    maps = oracle_predictions(scene, pyramid, NoiseSpec{1e-3, 2.0, 0.05, 1e-3}, 5);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_EncodeSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(encode_serial(f.scene.words, f.pyramid));
}

void BM_EncodeParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(encode(f.scene.words, f.pyramid));
}

void BM_BuildGraphSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_graph_serial(f.maps, f.pyramid, 0.5, 0.5));
}

void BM_BuildGraphParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(f.maps, f.pyramid, 0.5, 0.5));
}

void BM_DetectSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(detect_full(f.maps, f.pyramid, 0.5, 0.5, false));
  state.counters["locations/s"] = benchmark::Counter(
      static_cast<double>(f.pyramid.total_cells()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_DetectParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(detect_full(f.maps, f.pyramid, 0.5, 0.5, true));
  state.counters["locations/s"] = benchmark::Counter(
      static_cast<double>(f.pyramid.total_cells()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Features(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(compute_features(f.scene, f.pyramid));
}

BENCHMARK(BM_EncodeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGraphSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGraphParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Features)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
