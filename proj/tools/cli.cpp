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

#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "seglink/decoder.hpp"
#include "seglink/encoder.hpp"
#include "seglink/errors.hpp"
#include "seglink/evalproto.hpp"
#include "seglink/io.hpp"
#include "seglink/render.hpp"
#include "seglink/synth.hpp"
#include "seglink/trainer.hpp"

namespace seglink::cli {

namespace {

namespace fs = std::filesystem;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Runs fn(i) for every index, in parallel, and rethrows the error of the
// lowest failing index.
template <class F>
void for_each_index(size_t n, F&& fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      fn(static_cast<size_t>(i));
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string map_name(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%05zu.slpm", i);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot write " + path.string());
  f << text;
}

std::vector<io::MapFile> load_all_maps(const fs::path& path) {
  const auto paths = io::map_paths(path);
  if (paths.empty()) throw FormatError("no map files under " + path.string());
  std::vector<io::MapFile> files(paths.size());
  for_each_index(paths.size(), [&](size_t i) { files[i] = io::load_maps(paths[i]); });
  return files;
}

void check_pairing(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b) +
                     " images");
  }
}

struct Options {
  std::uint64_t seed = 0;
  int jobs = 0;

  // synth
  std::string out;
  int count = 10;
  SceneConfig scene;

  // encode / oracle / decode / eval / grid-search / render
  std::string scenes;
  std::string out_dir;
  std::string maps;
  std::string detections;
  std::string groundtruth;
  NoiseSpec noise;
  double alpha = 0.5;
  double beta = 0.5;
  double iou = kDefaultIouThreshold;
  double step = 0.1;
  bool degrees = false;
  bool full_grid = false;
  int index = 0;

  // train-toy
  TrainConfig train;
  double lr = -1.0;
  bool no_augment = false;
  std::string predict_dir;

  // bench
  int bench_w = 1280;
  int bench_h = 768;
  int repeats = 20;
  int bench_words = 30;
};

int cmd_synth(const Options& o, std::ostream& out) {
  io::SceneSet set;
  set.scenes.resize(static_cast<size_t>(o.count));
  for_each_index(set.scenes.size(), [&](size_t i) {
    set.scenes[i] = generate_scene(o.scene, mix_seed(o.seed, i));
  });
  io::save_scene_set(o.out, set);
  size_t words = 0;
  for (const Scene& s : set.scenes) words += s.words.size();
  out << "wrote " << set.scenes.size() << " scenes, " << words << " words to " << o.out << '\n';
  return kExitOk;
}

int cmd_encode(const Options& o, std::ostream& out) {
  const io::SceneSet set = io::load_scene_set(o.scenes);
  fs::create_directories(o.out_dir);
  for_each_index(set.scenes.size(), [&](size_t i) {
    const Scene& s = set.scenes[i];
    const PyramidConfig cfg = s.pyramid_config(set.strides, set.gamma);
    const LayerPyramid p = build_pyramid(cfg);
    io::save_maps(fs::path(o.out_dir) / map_name(i), cfg, encode(s.words, p).to_tensor());
  });
  out << "encoded " << set.scenes.size() << " scenes into " << o.out_dir << '\n';
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  validate(o.noise);
  const io::SceneSet set = io::load_scene_set(o.scenes);
  fs::create_directories(o.out_dir);
  for_each_index(set.scenes.size(), [&](size_t i) {
    const Scene& s = set.scenes[i];
    const PyramidConfig cfg = s.pyramid_config(set.strides, set.gamma);
    const LayerPyramid p = build_pyramid(cfg);
    io::save_maps(fs::path(o.out_dir) / map_name(i), cfg,
                  oracle_predictions(s, p, o.noise, mix_seed(o.seed, i)));
  });
  out << "wrote oracle maps for " << set.scenes.size() << " scenes into " << o.out_dir << '\n';
  return kExitOk;
}

int cmd_decode(const Options& o, std::ostream& out) {
  const auto files = load_all_maps(o.maps);
  io::SceneSet dets;
  dets.scenes.resize(files.size());
  for_each_index(files.size(), [&](size_t i) {
    const LayerPyramid p = build_pyramid(files[i].pyramid);
    const auto boxes =
        detect_full(PredictionMaps(files[i].maps), p, o.alpha, o.beta, false).boxes;
    Scene& s = dets.scenes[i];
    s.canvas_w = files[i].pyramid.input_w;
    s.canvas_h = files[i].pyramid.input_h;
    s.seed = i;
    for (size_t k = 0; k < boxes.size(); ++k) s.words.push_back({boxes[k], static_cast<int>(k)});
  });
  if (!files.empty()) {
    dets.strides = files.front().pyramid.strides;
    dets.gamma = files.front().pyramid.gamma;
  }
  io::save_scene_set(o.out, dets);
  size_t total = 0;
  for (size_t i = 0; i < dets.scenes.size(); ++i) {
    total += dets.scenes[i].words.size();
    if (!o.degrees) continue;
    for (const WordBox& w : dets.scenes[i].words) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "image %zu box %d: x=%.2f y=%.2f w=%.2f h=%.2f theta=%.2f deg\n",
                    i, w.id, w.rect.x, w.rect.y, w.rect.w, w.rect.h, w.rect.theta * 180.0 / kPi);
      out << buf;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "decoded %zu images at alpha=%.2f beta=%.2f: %zu detections\n",
                dets.scenes.size(), o.alpha, o.beta, total);
  out << buf;
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const io::SceneSet dets = io::load_scene_set(o.detections, false);
  const io::SceneSet gts = io::load_scene_set(o.groundtruth);
  check_pairing(dets.scenes.size(), gts.scenes.size(), "detections vs groundtruth");
  std::vector<EvalReport> reports(dets.scenes.size());
  for_each_index(reports.size(), [&](size_t i) {
    reports[i] = match_and_score(dets.scenes[i].rects(), gts.scenes[i].rects(), o.iou);
  });
  for (size_t i = 0; i < reports.size(); ++i) {
    out << io::report_record(reports[i], static_cast<int>(i)) << '\n';
  }
  out << io::aggregate_record(aggregate(reports)) << '\n';
  return kExitOk;
}

int cmd_grid_search(const Options& o, std::ostream& out) {
  const auto files = load_all_maps(o.maps);
  const io::SceneSet gts = io::load_scene_set(o.groundtruth);
  check_pairing(files.size(), gts.scenes.size(), "maps vs groundtruth");
  std::vector<ValidationImage> images;
  images.reserve(files.size());
  for (size_t i = 0; i < files.size(); ++i) {
    images.push_back({PredictionMaps(files[i].maps), build_pyramid(files[i].pyramid),
                      gts.scenes[i].rects()});
  }
  const GridSearchResult r = grid_search_thresholds(images, o.step, o.iou);
  char buf[200];
  if (o.full_grid) {
    for (const GridPoint& g : r.grid) {
      std::snprintf(buf, sizeof buf, "{\"alpha\":%.2f,\"beta\":%.2f,\"f_measure\":%.6f}\n",
                    g.alpha, g.beta, g.report.f_measure);
      out << buf;
    }
  }
  std::snprintf(buf, sizeof buf,
                "{\"best\":true,\"alpha\":%.2f,\"beta\":%.2f,\"precision\":%.6f,\"recall\":%.6f,"
                "\"f_measure\":%.6f}\n",
                r.alpha, r.beta, r.report.precision, r.report.recall, r.report.f_measure);
  out << buf;
  return kExitOk;
}

int cmd_train(Options o, std::ostream& out) {
  const io::SceneSet set = io::load_scene_set(o.scenes);
  TrainConfig cfg = o.train;
  cfg.seed = o.seed;
  cfg.strides = set.strides;
  cfg.gamma = set.gamma;
  if (o.lr >= 0.0) cfg.schedule = {{0, o.lr}};
  if (o.no_augment) cfg.augment = false;
  validate(cfg);
  const double before = dataset_loss(ToyPredictor::zeros(), set.scenes, cfg);
  const TrainResult r = train_toy(set.scenes, cfg);
  const double after = dataset_loss(r.predictor, set.scenes, cfg);
  io::save_predictor(o.out, r.predictor);
  if (!o.predict_dir.empty()) {
    fs::create_directories(o.predict_dir);
    for_each_index(set.scenes.size(), [&](size_t i) {
      const Scene& s = set.scenes[i];
      const PyramidConfig pc = s.pyramid_config(set.strides, set.gamma);
      io::save_maps(fs::path(o.predict_dir) / map_name(i), pc,
                    predict(r.predictor, s, build_pyramid(pc)));
    });
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "iterations=%d loss_before=%.6f loss_after=%.6f ratio=%.4f\n",
                cfg.iterations, before, after, before > 0.0 ? after / before : 0.0);
  out << buf;
  return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out) {
  const io::SceneSet set = io::load_scene_set(o.scenes, false);
  if (o.index < 0 || static_cast<size_t>(o.index) >= set.scenes.size()) {
    throw IndexError("scene index " + std::to_string(o.index) + " out of range");
  }
  const Scene& s = set.scenes[static_cast<size_t>(o.index)];
  std::string svg;
  if (o.maps.empty()) {
    svg = render_svg(s);
  } else {
    const io::MapFile f = io::load_maps(o.maps);
    const DetectionResult d =
        detect_full(PredictionMaps(f.maps), build_pyramid(f.pyramid), o.alpha, o.beta, false);
    svg = render_svg(s, &d.graph, d.boxes);
  }
  if (o.out.empty()) {
    out << svg;
  } else {
    write_text(o.out, svg);
  }
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  SceneConfig sc = o.scene;
  sc.canvas_w = o.bench_w;
  sc.canvas_h = o.bench_h;
  sc.min_words = sc.max_words = o.bench_words;
  const Scene s = generate_scene(sc, o.seed);
  const LayerPyramid p = build_pyramid(s.pyramid_config());
  const PredictionMaps maps = oracle_predictions(s, p, o.noise, mix_seed(o.seed, 0));
  size_t boxes = 0;
  double best = 1e300;
  double total = 0.0;
  for (int r = 0; r < o.repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    boxes = detect_full(maps, p, o.alpha, o.beta, false).boxes.size();
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    best = std::min(best, ms);
    total += ms;
  }
  const double mean = total / o.repeats;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "input=%dx%d locations=%zu words=%zu detections=%zu\n"
                "decode+combine: %.3f ms/image (mean), %.3f ms/image (best), %.0f locations/sec\n",
                o.bench_w, o.bench_h, p.total_cells(), s.words.size(), boxes, mean, best,
                static_cast<double>(p.total_cells()) / (mean / 1000.0));
  out << buf;
  return kExitOk;
}

void add_noise_flags(CLI::App* sub, Options& o) {
  sub->add_option("--score-flip", o.noise.score_flip_rate, "segment label flip probability")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--score-jitter", o.noise.score_jitter, "stddev of logit noise")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--offset-jitter", o.noise.offset_jitter, "offset noise half-width")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--link-flip", o.noise.link_flip_rate, "link label flip probability")
      ->check(CLI::Range(0.0, 1.0));
}

void add_threshold_flags(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.alpha, "segment score threshold")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--beta", o.beta, "link score threshold")->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Oriented text detection by linking segments, without the backbone"};
  app.name("seglink");
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "seed for every random choice");
  app.add_option("--jobs", o.jobs, "worker threads (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "generate synthetic scenes");
  synth->add_option("--out", o.out, "scene file to write")->required();
  synth->add_option("--count", o.count, "number of scenes")->check(CLI::NonNegativeNumber);
  synth->add_option("--canvas-width", o.scene.canvas_w);
  synth->add_option("--canvas-height", o.scene.canvas_h);
  synth->add_option("--min-words", o.scene.min_words)->check(CLI::NonNegativeNumber);
  synth->add_option("--max-words", o.scene.max_words)->check(CLI::NonNegativeNumber);
  synth->add_option("--min-height", o.scene.min_height);
  synth->add_option("--max-height", o.scene.max_height);
  synth->add_option("--min-theta", o.scene.min_theta, "radians");
  synth->add_option("--max-theta", o.scene.max_theta, "radians");

  auto* enc = app.add_subcommand("encode", "write groundtruth maps for a scene file");
  enc->add_option("--scenes", o.scenes)->required();
  enc->add_option("--out-dir", o.out_dir)->required();

  auto* oracle = app.add_subcommand("oracle", "write noisy oracle prediction maps");
  oracle->add_option("--scenes", o.scenes)->required();
  oracle->add_option("--out-dir", o.out_dir)->required();
  add_noise_flags(oracle, o);

  auto* dec = app.add_subcommand("decode", "detect word boxes from prediction maps");
  dec->add_option("--maps", o.maps, "map file or directory of .slpm files")->required();
  dec->add_option("--out", o.out, "detection file to write")->required();
  add_threshold_flags(dec, o);
  dec->add_flag("--degrees", o.degrees, "also print detections with angles in degrees");

  auto* ev = app.add_subcommand("eval", "score detections against groundtruth");
  ev->add_option("--detections", o.detections)->required();
  ev->add_option("--groundtruth", o.groundtruth)->required();
  ev->add_option("--iou", o.iou)->check(CLI::Range(0.0, 1.0));

  auto* grid = app.add_subcommand("grid-search", "sweep alpha and beta on a validation set");
  grid->add_option("--maps", o.maps)->required();
  grid->add_option("--groundtruth", o.groundtruth)->required();
  grid->add_option("--step", o.step)->check(CLI::Range(0.01, 0.5));
  grid->add_option("--iou", o.iou)->check(CLI::Range(0.0, 1.0));
  grid->add_flag("--full", o.full_grid, "print every grid point");

  auto* train = app.add_subcommand("train-toy", "train the toy predictor");
  train->add_option("--scenes", o.scenes)->required();
  train->add_option("--out", o.out, "predictor file to write")->required();
  train->add_option("--iterations", o.train.iterations)->check(CLI::NonNegativeNumber);
  train->add_option("--batch-size", o.train.batch_size)->check(CLI::PositiveNumber);
  train->add_option("--lr", o.lr, "constant learning rate instead of the default schedule")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--momentum", o.train.momentum)->check(CLI::Range(0.0, 1.0));
  train->add_option("--lambda-loc", o.train.loss.lambda_loc)->check(CLI::NonNegativeNumber);
  train->add_option("--lambda-link", o.train.loss.lambda_link)->check(CLI::NonNegativeNumber);
  train->add_option("--neg-ratio", o.train.loss.neg_ratio)->check(CLI::NonNegativeNumber);
  train->add_flag("--no-augment", o.no_augment, "train on uncropped scenes");
  train->add_option("--predict-dir", o.predict_dir, "write the trained predictions here");

  auto* render = app.add_subcommand("render", "draw a scene as SVG");
  render->add_option("--scenes", o.scenes)->required();
  render->add_option("--index", o.index, "scene to draw");
  render->add_option("--maps", o.maps, "prediction maps to decode and overlay");
  render->add_option("--out", o.out, "SVG file (default: stdout)");
  add_threshold_flags(render, o);

  auto* bench = app.add_subcommand("bench", "time decode and combine single-threaded");
  bench->add_option("--width", o.bench_w);
  bench->add_option("--height", o.bench_h);
  bench->add_option("--words", o.bench_words, "words placed in the scene")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--repeats", o.repeats)->check(CLI::PositiveNumber);
  add_threshold_flags(bench, o);
  add_noise_flags(bench, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  const int saved_threads = omp_get_max_threads();
  if (o.jobs > 0) omp_set_num_threads(o.jobs);
  int status = kExitOk;
  try {
    if (synth->parsed()) {
      status = cmd_synth(o, out);
    } else if (enc->parsed()) {
      status = cmd_encode(o, out);
    } else if (oracle->parsed()) {
      status = cmd_oracle(o, out);
    } else if (dec->parsed()) {
      status = cmd_decode(o, out);
    } else if (ev->parsed()) {
      status = cmd_eval(o, out);
    } else if (grid->parsed()) {
      status = cmd_grid_search(o, out);
    } else if (train->parsed()) {
      status = cmd_train(o, out);
    } else if (render->parsed()) {
      status = cmd_render(o, out);
    } else if (bench->parsed()) {
      omp_set_num_threads(1);
      status = cmd_bench(o, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    status = kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    status = kExitData;
  }
  omp_set_num_threads(saved_threads);
  return status;
}

}  // namespace seglink::cli
