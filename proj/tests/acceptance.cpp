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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if
// any criterion fails.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seglink/decoder.hpp"
#include "seglink/encoder.hpp"
#include "seglink/evalproto.hpp"
#include "seglink/loss.hpp"
#include "seglink/synth.hpp"
#include "seglink/trainer.hpp"

namespace {

using namespace seglink;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

Outcome encode_decode_inversion() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  const LayerPyramid p = build_pyramid(512, 512);
  int pairs = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; pairs < 1000; ++seed) {
    const Scene s = generate_scene(SceneConfig{}, seed);
    const auto labels = label_default_boxes(s.words, p);
    std::vector<std::pair<GridIndex, int>> pos;
    for (const BoxLabels& bl : labels) {
      for (int y = 0; y < bl.h; ++y) {
        for (int x = 0; x < bl.w; ++x) {
          const size_t c = static_cast<size_t>(y) * bl.w + x;
          if (bl.seg_label[c]) pos.push_back({{bl.l, x, y}, bl.match_id[c]});
        }
      }
    }
    std::shuffle(pos.begin(), pos.end(), rng);
    for (size_t i = 0; i < pos.size() && i < 5 && pairs < 1000; ++i, ++pairs) {
      const RotatedRect d = default_box(p, pos[i].first);
      const auto word = std::find_if(s.words.begin(), s.words.end(),
                                     [&](const WordBox& w) { return w.id == pos[i].second; });
      const RotatedRect seg = groundtruth_segment(d, *word);
      const RotatedRect back = decode_segment(encode_offsets(seg, d), d);
      worst = std::max({worst, rel_err(back.x, seg.x), rel_err(back.y, seg.y), rel_err(back.w, seg.w),
                        rel_err(back.h, seg.h), rel_err(back.theta, seg.theta)});
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 1.0,
          format("%d pairs, max relative error %.2e (tol 1e-6), %.3f s (budget 1 s)", pairs, worst, t)};
}

Outcome oracle_roundtrip() {
  const auto t0 = Clock::now();
  const int n = 500;
  std::vector<EvalReport> reports(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const Scene s = generate_scene(SceneConfig{}, 100000 + static_cast<std::uint64_t>(i));
    const LayerPyramid p = build_pyramid(s.pyramid_config());
    reports[static_cast<size_t>(i)] =
        match_and_score(detect(oracle_predictions(s, p), p, 0.5, 0.5), s.rects(), 0.5);
  }
  const EvalReport agg = aggregate(reports);
  double min_iou = 1.0;
  for (const EvalReport& r : reports)
    for (const Match& m : r.matches) min_iou = std::min(min_iou, m.iou);
  const double t = seconds_since(t0);
  return {agg.f_measure >= 0.95 && min_iou >= 0.8 && t < 60.0,
          format("%d scenes, %d words, F=%.4f (min 0.95), min matched IoU %.4f (min 0.8), %.2f s "
                 "(budget 60 s)",
                 n, agg.true_positives + agg.false_negatives, agg.f_measure, min_iou, t)};
}

Outcome word_separation() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> height(12.0, 48.0), aspect(3.0, 8.0),
      angle(-kPi / 4, kPi / 4), gap_scale(1.0, 2.0);
  const LayerPyramid p = build_pyramid(512, 512);
  int good = 0;
  std::string first_bad;
  for (int i = 0; i < 100; ++i) {
    const double h = height(rng);
    int stride = 0;
    for (const LayerSpec& l : p.layers())
      if (size_ratio(l.a, h) <= 1.5) stride = std::max(stride, l.stride);
    const double gap = stride * gap_scale(rng);
    const Scene s = parallel_pair_scene(512, 512, h * aspect(rng), h, angle(rng), gap);
    const size_t found = detect(oracle_predictions(s, p), p, 0.5, 0.5).size();
    if (found == 2) {
      ++good;
    } else if (first_bad.empty()) {
      first_bad = format(", scene %d gave %zu", i, found);
    }
  }
  const double t = seconds_since(t0);
  return {good == 100 && t < 10.0,
          format("%d/100 scenes with exactly 2 detections%s, %.2f s (budget 10 s)", good,
                 first_bad.c_str(), t)};
}

Outcome combine_oracle() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_shift = 0.0;
  int perm_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(u(rng) * 20);
    const double base = -1.0 + 2.0 * u(rng);
    const double cx = 100 + 300 * u(rng), cy = 100 + 300 * u(rng);
    std::vector<RotatedRect> segs;
    for (int k = 0; k < n; ++k) {
      const double t = -150 + 300 * u(rng);
      const double off = -5 + 10 * u(rng);
      segs.emplace_back(cx + t * std::cos(base) - off * std::sin(base),
                        cy + t * std::sin(base) + off * std::cos(base), 5 + 25 * u(rng),
                        5 + 25 * u(rng), base - 0.15 + 0.3 * u(rng));
    }
    const RotatedRect got = combine_segments(segs);
    const RotatedRect want = oracle::brute_combine(segs);
    worst = std::max({worst, std::abs(got.x - want.x), std::abs(got.y - want.y),
                      std::abs(got.w - want.w), std::abs(got.h - want.h),
                      std::abs(got.theta - want.theta)});
    auto shuffled = segs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (!(combine_segments(shuffled) == got)) ++perm_bad;
    const double dx = -100 + 200 * u(rng), dy = -100 + 200 * u(rng);
    auto moved = segs;
    for (auto& s : moved) {
      s.x += dx;
      s.y += dy;
    }
    const RotatedRect m = combine_segments(moved);
    worst_shift = std::max({worst_shift, std::abs(m.x - got.x - dx), std::abs(m.y - got.y - dy),
                            std::abs(m.w - got.w), std::abs(m.h - got.h),
                            std::abs(m.theta - got.theta)});
  }
  return {worst <= 1e-9 && perm_bad == 0 && worst_shift <= 1e-9,
          format("1000 components, max deviation from brute force %.2e (tol 1e-9), %d "
                 "order-dependent, max translation error %.2e (tol 1e-9)",
                 worst, perm_bad, worst_shift)};
}

Outcome components_oracle() {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(u(rng) * 50);
    const double density = u(rng) * 4.0 / n;
    SegmentGraph g;
    g.nodes.resize(static_cast<size_t>(n));
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (u(rng) < density) {
          edges.push_back({a, b});
          g.edges.push_back({a, b, 1.0, LinkKind::kWithin});
        }
    if (connected_components(g) != oracle::closure_components(n, edges)) ++bad;
  }
  return {bad == 0, format("100 random graphs (<= 50 nodes), %d disagree with transitive closure", bad)};
}

struct Instance {
  std::vector<Scene> scenes;
  std::vector<LayerPyramid> pyramids;
  std::vector<LogitMaps> logits;
  std::vector<GroundTruthMaps> gts;
};

Instance random_instance(std::mt19937_64& rng, int images, int max_words, double logit_sd) {
  Instance in;
  SceneConfig sc;
  sc.canvas_w = sc.canvas_h = 256;
  sc.min_words = 0;
  sc.max_words = max_words;
  std::normal_distribution<double> score(0.0, logit_sd), offset(0.0, 0.5);
  for (int b = 0; b < images; ++b) {
    in.scenes.push_back(generate_scene(sc, rng()));
    in.pyramids.push_back(build_pyramid(in.scenes.back().pyramid_config()));
    LogitMaps m{ChannelStack::zeros(in.pyramids.back())};
    for (LayerTensor& t : m.layers) {
      for (size_t i = 0; i < t.data.size(); ++i) {
        const int ch = static_cast<int>(i % static_cast<size_t>(t.c));
        t.data[i] = (ch >= channel::kOffset && ch < channel::kWithin) ? offset(rng) : score(rng);
      }
    }
    in.logits.push_back(std::move(m));
    in.gts.push_back(encode(in.scenes.back().words, in.pyramids.back()));
  }
  return in;
}

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Outcome gradient_check() {
  std::mt19937_64 rng(53);
  const double h = 1e-4;
  double worst = 0.0, worst_param = 0.0;
  long checked = 0;
  for (int inst = 0; inst < 20; ++inst) {
    Instance in = random_instance(rng, 2, 3, 1.0);
    if (std::all_of(in.gts.begin(), in.gts.end(),
                    [](const GroundTruthMaps& g) { return g.positive_links() == 0; })) {
      --inst;
      continue;
    }
    const MinedMask mask = mine(in.logits, in.gts);
    const auto grads = loss_gradient(in.logits, in.gts, mask);
    struct Coord {
      size_t img, layer, i;
    };
    std::vector<Coord> live, idle;
    for (size_t b = 0; b < grads.size(); ++b)
      for (size_t l = 0; l < grads[b].layers.size(); ++l)
        for (size_t i = 0; i < grads[b].layers[l].data.size(); ++i)
          (grads[b].layers[l].data[i] != 0.0 ? live : idle).push_back({b, l, i});
    std::shuffle(live.begin(), live.end(), rng);
    std::shuffle(idle.begin(), idle.end(), rng);
    live.resize(std::min<size_t>(live.size(), 150));
    live.insert(live.end(), idle.begin(), idle.begin() + std::min<size_t>(idle.size(), 50));
    for (const Coord& c : live) {
      auto probe = in.logits;
      double& v = probe[c.img].layers[c.layer].data[c.i];
      const double v0 = v;
      v = v0 + h;
      const double up = evaluate_loss(probe, in.gts, mask).total;
      v = v0 - h;
      const double down = evaluate_loss(probe, in.gts, mask).total;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, relative(grads[c.img].layers[c.layer].data[c.i], fd));
      ++checked;
    }

    // The same check one level down, through the linear predictor.
    ToyPredictor model = ToyPredictor::zeros();
    std::normal_distribution<double> w(0.0, 0.3);
    for (auto& lp : model.layers) {
      for (double& x : lp.weight) x = w(rng);
      for (double& x : lp.bias) x = w(rng);
    }
    std::vector<FeatureMaps> feats;
    for (size_t b = 0; b < in.scenes.size(); ++b)
      feats.push_back(compute_features(in.scenes[b], in.pyramids[b]));
    const auto forward_all = [&](const ToyPredictor& m) {
      std::vector<LogitMaps> out;
      for (size_t b = 0; b < feats.size(); ++b) out.push_back(forward(m, feats[b], in.pyramids[b]));
      return out;
    };
    const auto logits = forward_all(model);
    const MinedMask pmask = mine(logits, in.gts);
    const auto lg = loss_gradient(logits, in.gts, pmask);
    ToyPredictor pg = ToyPredictor::zeros();
    for (size_t b = 0; b < feats.size(); ++b) accumulate(pg, backward(feats[b], lg[b]));
    std::uniform_int_distribution<size_t> layer_pick(0, kNumLayers - 1);
    for (int k = 0; k < 20; ++k) {
      const size_t l = layer_pick(rng);
      std::uniform_int_distribution<size_t> idx(0, model.layers[l].weight.size() - 1);
      const size_t i = idx(rng);
      ToyPredictor m = model;
      m.layers[l].weight[i] += h;
      const double up = evaluate_loss(forward_all(m), in.gts, pmask).total;
      m.layers[l].weight[i] -= 2 * h;
      const double down = evaluate_loss(forward_all(m), in.gts, pmask).total;
      worst_param = std::max(worst_param, relative(pg.layers[l].weight[i], (up - down) / (2 * h)));
      ++checked;
    }
  }
  return {worst < 1e-4 && worst_param < 1e-4,
          format("20 instances, %ld coordinates, max relative error %.2e on logits, %.2e on "
                 "predictor weights (tol 1e-4, step 1e-4)",
                 checked, worst, worst_param)};
}

Outcome ohem_contract() {
  std::mt19937_64 rng(67);
  int bad = 0;
  double max_ratio = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int images = 1 + static_cast<int>(rng() % 4);
    const Instance in = random_instance(rng, images, 4, 1.5);
    const MinedMask mask = mine(in.logits, in.gts);
    std::vector<double> seg_loss, link_loss;
    std::vector<std::uint8_t> seg_label, link_label;
    for (size_t b = 0; b < in.gts.size(); ++b) {
      for (const GroundTruthLayer& g : in.gts[b].layers) {
        const LayerTensor& t = in.logits[b].layer(g.l);
        for (int y = 0; y < g.h; ++y) {
          for (int x = 0; x < g.w; ++x) {
            const size_t c = g.cell(x, y);
            seg_label.push_back(g.seg_label[c]);
            seg_loss.push_back(oracle::softmax_nll(t.at(x, y, 0), t.at(x, y, 1), g.seg_label[c]));
            for (int k = 0; k < kWithinSlots; ++k) {
              const int lab = g.within_link[c * kWithinSlots + k];
              link_label.push_back(static_cast<std::uint8_t>(lab));
              link_loss.push_back(oracle::softmax_nll(t.at(x, y, channel::within_neg(k)),
                                                      t.at(x, y, channel::within_pos(k)), lab));
            }
            if (g.l == 1) continue;
            for (int k = 0; k < kCrossSlots; ++k) {
              const int lab = g.cross_link[c * kCrossSlots + k];
              link_label.push_back(static_cast<std::uint8_t>(lab));
              link_loss.push_back(oracle::softmax_nll(t.at(x, y, channel::cross_neg(k)),
                                                      t.at(x, y, channel::cross_pos(k)), lab));
            }
          }
        }
      }
    }
    const auto want_seg = oracle::sort_mining(seg_loss, seg_label, 3.0);
    const auto want_link = oracle::sort_mining(link_loss, link_label, 3.0);
    if (mask.seg != want_seg || mask.link != want_link) ++bad;
    for (const auto* pair : {&mask.seg, &mask.link}) {
      const auto& m = *pair;
      const auto& lab = pair == &mask.seg ? seg_label : link_label;
      size_t pos = 0, neg = 0;
      for (size_t j = 0; j < m.size(); ++j) {
        if (lab[j] && !m[j]) ++bad;
        if (m[j]) (lab[j] ? pos : neg) += 1;
      }
      if (neg > 3 * pos) ++bad;
      if (pos > 0) max_ratio = std::max(max_ratio, static_cast<double>(neg) / pos);
    }
  }
  return {bad == 0, format("100 batches, %d violations of sort oracle / positive retention / 3:1 "
                           "cap, max negative:positive %.3f",
                           bad, max_ratio)};
}

Outcome iou_raster() {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int overlapping = 0;
  for (int i = 0; i < 200; ++i) {
    const RotatedRect a(25 + 50 * u(rng), 25 + 50 * u(rng), 5 + 40 * u(rng), 5 + 40 * u(rng),
                        kPi * (u(rng) - 0.5));
    const RotatedRect b(a.x - 15 + 30 * u(rng), a.y - 15 + 30 * u(rng), 5 + 40 * u(rng),
                        5 + 40 * u(rng), kPi * (u(rng) - 0.5));
    const double got = rotated_iou(a, b);
    if (got > 0.0) ++overlapping;
    worst = std::max(worst, std::abs(got - oracle::raster_iou(a, b, 0.05)));
  }
  return {worst < 0.01, format("200 pairs (%d overlapping), max |IoU - raster IoU| %.5f (tol 0.01)",
                               overlapping, worst)};
}

Outcome threshold_robustness() {
  const NoiseSpec noise{2e-4, 3.0, 0.1, 5e-4};
  std::vector<ValidationImage> images(100);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < 100; ++i) {
    const Scene s = generate_scene(SceneConfig{}, 200000 + static_cast<std::uint64_t>(i));
    const LayerPyramid p = build_pyramid(s.pyramid_config());
    images[static_cast<size_t>(i)] = {oracle_predictions(s, p, noise, 300000 + static_cast<std::uint64_t>(i)), p, s.rects()};
  }
  const GridSearchResult r = grid_search_thresholds(images);
  double worst = 0.0;
  std::string shifts;
  int skipped = 0;
  for (const auto& [da, db] : {std::pair{-0.1, 0.0}, {0.1, 0.0}, {0.0, -0.1}, {0.0, 0.1}}) {
    const double a = std::round((r.alpha + da) * 10) / 10;
    const double b = std::round((r.beta + db) * 10) / 10;
    if (a < 0.1 - 1e-9 || a > 0.9 + 1e-9 || b < 0.1 - 1e-9 || b > 0.9 + 1e-9) {
      ++skipped;
      continue;
    }
    const double f = evaluate_at(images, a, b).f_measure;
    worst = std::max(worst, r.report.f_measure - f);
    shifts += format(" F(%.1f,%.1f)=%.4f", a, b, f);
  }
  return {worst * 100 < 2.0,
          format("noise {flip 2e-4, logit jitter 3.0, offset jitter 0.1, link flip 5e-4}, 100 "
                 "scenes: best (%.1f,%.1f) F=%.4f;%s; %d off-grid shifts skipped; max drop %.2f "
                 "points (max 2)",
                 r.alpha, r.beta, r.report.f_measure, shifts.c_str(), skipped, worst * 100)};
}

double heldout_f(const ToyPredictor& m, const std::vector<Scene>& val,
                 const std::vector<Scene>& test, double* alpha, double* beta) {
  const auto images = [&](const std::vector<Scene>& scenes) {
    std::vector<ValidationImage> out;
    for (const Scene& s : scenes) {
      const LayerPyramid p = build_pyramid(s.pyramid_config());
      out.push_back({predict(m, s, p), p, s.rects()});
    }
    return out;
  };
  const GridSearchResult r = grid_search_thresholds(images(val));
  *alpha = r.alpha;
  *beta = r.beta;
  return evaluate_at(images(test), r.alpha, r.beta).f_measure;
}

Outcome toy_training() {
  const auto t0 = Clock::now();
  SceneConfig sc;
  sc.min_words = sc.max_words = 1;
  std::vector<Scene> train, val, test;
  for (std::uint64_t i = 0; i < 200; ++i) train.push_back(generate_scene(sc, 400000 + i));
  for (std::uint64_t i = 0; i < 50; ++i) val.push_back(generate_scene(sc, 500000 + i));
  for (std::uint64_t i = 0; i < 100; ++i) test.push_back(generate_scene(sc, 600000 + i));
  TrainConfig cfg;
  cfg.seed = 2024;
  const TrainResult r = train_toy(train, cfg);
  const double before = dataset_loss(ToyPredictor::zeros(), train, cfg);
  const double after = dataset_loss(r.predictor, train, cfg);
  double a0, b0, a1, b1;
  const double f0 = heldout_f(ToyPredictor::zeros(), val, test, &a0, &b0);
  const double f1 = heldout_f(r.predictor, val, test, &a1, &b1);
  const double t = seconds_since(t0);
  const double ratio = after / before;
  return {ratio < 0.25 && f1 > f0 && t < 300.0,
          format("200 scenes, %d iterations: loss %.4f -> %.4f (ratio %.4f, max 0.25); held-out F "
                 "%.4f at (%.1f,%.1f) untrained vs %.4f at (%.1f,%.1f) trained; %.1f s (budget 300 s)",
                 cfg.iterations, before, after, ratio, f0, a0, b0, f1, a1, b1, t)};
}

Outcome performance_budget() {
  SceneConfig sc;
  sc.canvas_w = 1280;
  sc.canvas_h = 768;
  sc.min_words = sc.max_words = 30;
  const Scene s = generate_scene(sc, 77);
  const LayerPyramid p = build_pyramid(s.pyramid_config());
  const PredictionMaps maps = oracle_predictions(s, p);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  std::vector<double> ms;
  size_t boxes = 0;
  for (int i = 0; i < 21; ++i) {
    const auto t0 = Clock::now();
    boxes = detect_full(maps, p, 0.5, 0.5, false).boxes.size();
    ms.push_back(seconds_since(t0) * 1000.0);
  }
  omp_set_num_threads(saved);
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  return {median < 50.0,
          format("1280x768 pyramid, %zu locations, %zu words -> %zu boxes: median %.3f ms "
                 "single-threaded (budget 50 ms)",
                 p.total_cells(), s.words.size(), boxes, median)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"encode_decode_inversion", encode_decode_inversion},
      {"oracle_roundtrip", oracle_roundtrip},
      {"word_separation", word_separation},
      {"combine_brute_force", combine_oracle},
      {"connected_components", components_oracle},
      {"gradient_check", gradient_check},
      {"hard_negative_mining", ohem_contract},
      {"rotated_iou_raster", iou_raster},
      {"threshold_robustness", threshold_robustness},
      {"toy_training", toy_training},
      {"performance_budget", performance_budget},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
