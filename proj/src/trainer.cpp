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

#include "seglink/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "seglink/encoder.hpp"
#include "seglink/errors.hpp"

namespace seglink {

namespace {

constexpr int kReduceChunk = 256;
constexpr double kProbeSide = 2.0;

struct Window {
  int x0, y0, x1, y1;
  double area;
};

Window window_at(Point c, double side) {
  Window w;
  w.x0 = static_cast<int>(std::lround(c.x - 0.5 * side));
  w.x1 = static_cast<int>(std::lround(c.x + 0.5 * side));
  w.y0 = static_cast<int>(std::lround(c.y - 0.5 * side));
  w.y1 = static_cast<int>(std::lround(c.y + 0.5 * side));
  w.area = static_cast<double>(std::max(1, w.x1 - w.x0)) * std::max(1, w.y1 - w.y0);
  return w;
}

void check_layers(const FeatureMaps& f, const LogitMaps& g) {
  if (f.layers.size() != g.layers.size()) throw ShapeError("feature and gradient layers differ");
}

}  // namespace

SceneRaster::SceneRaster(const Scene& scene) : w_(scene.canvas_w), h_(scene.canvas_h) {
  const size_t stride = static_cast<size_t>(w_) + 1;
  table_.assign(stride * (static_cast<size_t>(h_) + 1), RasterSums{});
  for (const WordBox& word : scene.words) {
    const AlignedBox b = axis_aligned_bbox(word.rect);
    const int x0 = std::max(0, static_cast<int>(std::floor(b.xmin)));
    const int x1 = std::min(w_, static_cast<int>(std::ceil(b.xmax)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.ymin)));
    const int y1 = std::min(h_, static_cast<int>(std::ceil(b.ymax)));
    const double lh = std::log(word.rect.h);
    const RasterSums v{1.0, std::sin(2.0 * word.rect.theta), std::cos(2.0 * word.rect.theta), lh,
                       lh * lh};
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        RasterSums& t = table_[static_cast<size_t>(y + 1) * stride + static_cast<size_t>(x + 1)];
        if (t.occupancy == 0.0 && contains(word.rect, {x + 0.5, y + 0.5})) t = v;
      }
    }
  }
  // In-place 2-D prefix sums.
  for (int y = 1; y <= h_; ++y) {
    RasterSums row;
    RasterSums* cur = &table_[static_cast<size_t>(y) * stride];
    const RasterSums* prev = cur - stride;
    for (int x = 1; x <= w_; ++x) {
      row.occupancy += cur[x].occupancy;
      row.sin2 += cur[x].sin2;
      row.cos2 += cur[x].cos2;
      row.log_h += cur[x].log_h;
      row.log_h_sq += cur[x].log_h_sq;
      cur[x] = {row.occupancy + prev[x].occupancy, row.sin2 + prev[x].sin2,
                row.cos2 + prev[x].cos2, row.log_h + prev[x].log_h,
                row.log_h_sq + prev[x].log_h_sq};
    }
  }
}

RasterSums SceneRaster::sums(int x0, int y0, int x1, int y1) const {
  x0 = std::clamp(x0, 0, w_);
  x1 = std::clamp(x1, 0, w_);
  y0 = std::clamp(y0, 0, h_);
  y1 = std::clamp(y1, 0, h_);
  if (x1 <= x0 || y1 <= y0) return {};
  const size_t s = static_cast<size_t>(w_) + 1;
  const RasterSums& a = table_[static_cast<size_t>(y1) * s + static_cast<size_t>(x1)];
  const RasterSums& b = table_[static_cast<size_t>(y1) * s + static_cast<size_t>(x0)];
  const RasterSums& c = table_[static_cast<size_t>(y0) * s + static_cast<size_t>(x1)];
  const RasterSums& d = table_[static_cast<size_t>(y0) * s + static_cast<size_t>(x0)];
  return {a.occupancy - b.occupancy - c.occupancy + d.occupancy, a.sin2 - b.sin2 - c.sin2 + d.sin2,
          a.cos2 - b.cos2 - c.cos2 + d.cos2, a.log_h - b.log_h - c.log_h + d.log_h,
          a.log_h_sq - b.log_h_sq - c.log_h_sq + d.log_h_sq};
}

CellFeatures cell_features(const SceneRaster& raster, const LayerPyramid& p, GridIndex idx) {
  const RotatedRect d = default_box(p, idx);
  const LayerSpec& spec = p.layer(idx.l);
  const auto occupancy = [&](Point c, double side) {
    const Window w = window_at(c, side);
    return raster.occupancy_sum(w.x0, w.y0, w.x1, w.y1) / w.area;
  };
  CellFeatures f{};
  for (int k = 0; k < 3; ++k) f[static_cast<size_t>(k)] = occupancy(d.center(), d.w * (1 << k));
  const Window w = window_at(d.center(), 2.0 * d.w);
  const RasterSums m = raster.sums(w.x0, w.y0, w.x1, w.y1);
  if (m.occupancy > 0.0) {
    f[3] = m.sin2 / m.occupancy;
    f[4] = m.cos2 / m.occupancy;
    const double la = std::log(d.w);
    const double m1 = m.log_h / m.occupancy;
    const double m2 = m.log_h_sq / m.occupancy;
    f[19] = m1 - la;
    f[20] = m2 - 2.0 * la * m1 + la * la;
  }
  f[kBiasFeature] = 1.0;

  const double sx = static_cast<double>(p.input_w()) / spec.w;
  const double sy = static_cast<double>(p.input_h()) / spec.h;
  const double probe = kProbeSide;
  f[6] = occupancy(d.center(), probe);
  for (int k = 0; k < kWithinSlots; ++k) {
    const Offset o = kWithinOffsets[static_cast<size_t>(k)];
    f[static_cast<size_t>(7 + k)] = occupancy({d.x + o.dx * sx, d.y + o.dy * sy}, probe);
  }
  if (idx.l > 1) {
    for (int k = 0; k < kCrossSlots; ++k) {
      const RotatedRect c = default_box(p, cross_neighbor(idx, k));
      f[static_cast<size_t>(15 + k)] = occupancy(c.center(), probe);
    }
  }
  return f;
}

FeatureMaps compute_features(const Scene& scene, const LayerPyramid& p) {
  const SceneRaster raster(scene);
  FeatureMaps out;
  for (const LayerSpec& s : p.layers()) {
    std::vector<CellFeatures> cells(static_cast<size_t>(s.cells()));
#pragma omp parallel for schedule(static)
    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        cells[static_cast<size_t>(y) * s.w + x] = cell_features(raster, p, {s.l, x, y});
      }
    }
    out.layers.push_back(std::move(cells));
  }
  return out;
}

ToyPredictor ToyPredictor::zeros() {
  ToyPredictor m;
  for (int l = 1; l <= kNumLayers; ++l) {
    const int c = channel::count(l);
    m.layers.push_back({l, c, std::vector<double>(static_cast<size_t>(kFeatureDim * c), 0.0),
                        std::vector<double>(static_cast<size_t>(c), 0.0)});
  }
  return m;
}

bool ToyPredictor::finite() const {
  for (const auto& lp : layers) {
    for (double v : lp.weight)
      if (!std::isfinite(v)) return false;
    for (double v : lp.bias)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

LogitMaps forward(const ToyPredictor& model, const FeatureMaps& features, const LayerPyramid& p) {
  if (static_cast<int>(model.layers.size()) != p.num_layers() ||
      static_cast<int>(features.layers.size()) != p.num_layers()) {
    throw ShapeError("predictor, features and pyramid disagree on the layer count");
  }
  LogitMaps out{ChannelStack::zeros(p)};
  for (const LayerSpec& s : p.layers()) {
    const LayerParams& lp = model.layers[static_cast<size_t>(s.l - 1)];
    const auto& feats = features.layers[static_cast<size_t>(s.l - 1)];
    LayerTensor& t = out.layer(s.l);
    if (lp.channels != t.c || feats.size() != static_cast<size_t>(s.cells())) {
      throw ShapeError("layer " + std::to_string(s.l) + " shape mismatch in forward pass");
    }
    const int cells = s.cells();
#pragma omp parallel for schedule(static)
    for (int cell = 0; cell < cells; ++cell) {
      const CellFeatures& f = feats[static_cast<size_t>(cell)];
      double* row = &t.data[static_cast<size_t>(cell) * static_cast<size_t>(t.c)];
      for (int c = 0; c < t.c; ++c) row[c] = lp.bias[static_cast<size_t>(c)];
      for (int k = 0; k < kFeatureDim; ++k) {
        const double fk = f[static_cast<size_t>(k)];
        if (fk == 0.0) continue;
        const double* wrow = &lp.weight[static_cast<size_t>(k) * static_cast<size_t>(t.c)];
        for (int c = 0; c < t.c; ++c) row[c] += fk * wrow[c];
      }
    }
  }
  return out;
}

ToyPredictor backward(const FeatureMaps& features, const LogitMaps& logit_grad) {
  check_layers(features, logit_grad);
  ToyPredictor g = ToyPredictor::zeros();
  for (size_t li = 0; li < logit_grad.layers.size(); ++li) {
    const LayerTensor& t = logit_grad.layers[li];
    const auto& feats = features.layers[li];
    LayerParams& lp = g.layers[li];
    const int cells = t.w * t.h;
    const int chunks = (cells + kReduceChunk - 1) / kReduceChunk;
    const size_t wsize = lp.weight.size();
    std::vector<double> partial(static_cast<size_t>(chunks) * (wsize + lp.bias.size()), 0.0);
#pragma omp parallel for schedule(static)
    for (int chunk = 0; chunk < chunks; ++chunk) {
      double* pw = &partial[static_cast<size_t>(chunk) * (wsize + lp.bias.size())];
      double* pb = pw + wsize;
      const int end = std::min(cells, (chunk + 1) * kReduceChunk);
      for (int cell = chunk * kReduceChunk; cell < end; ++cell) {
        const double* grow = &t.data[static_cast<size_t>(cell) * static_cast<size_t>(t.c)];
        const CellFeatures& f = feats[static_cast<size_t>(cell)];
        for (int c = 0; c < t.c; ++c) pb[c] += grow[c];
        for (int k = 0; k < kFeatureDim; ++k) {
          const double fk = f[static_cast<size_t>(k)];
          if (fk == 0.0) continue;
          double* wrow = pw + static_cast<size_t>(k) * static_cast<size_t>(t.c);
          for (int c = 0; c < t.c; ++c) wrow[c] += fk * grow[c];
        }
      }
    }
    for (int chunk = 0; chunk < chunks; ++chunk) {
      const double* pw = &partial[static_cast<size_t>(chunk) * (wsize + lp.bias.size())];
      for (size_t i = 0; i < wsize; ++i) lp.weight[i] += pw[i];
      for (size_t i = 0; i < lp.bias.size(); ++i) lp.bias[i] += pw[wsize + i];
    }
  }
  return g;
}

void accumulate(ToyPredictor& acc, const ToyPredictor& g) {
  for (size_t li = 0; li < acc.layers.size(); ++li) {
    auto& a = acc.layers[li];
    const auto& b = g.layers[li];
    for (size_t i = 0; i < a.weight.size(); ++i) a.weight[i] += b.weight[i];
    for (size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += b.bias[i];
  }
}

void sgd_momentum_step(std::span<double> params, std::span<const double> grads,
                       std::span<double> velocity, double lr, double momentum) {
  if (params.size() != grads.size() || params.size() != velocity.size()) {
    throw ShapeError("parameter, gradient and velocity sizes differ");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] - lr * grads[i];
    params[i] += velocity[i];
  }
}

void sgd_momentum_step(ToyPredictor& params, const ToyPredictor& grads, ToyPredictor& velocity,
                       double lr, double momentum) {
  if (params.layers.size() != grads.layers.size() ||
      params.layers.size() != velocity.layers.size()) {
    throw ShapeError("predictor layer counts differ");
  }
  for (size_t li = 0; li < params.layers.size(); ++li) {
    sgd_momentum_step(params.layers[li].weight, grads.layers[li].weight,
                      velocity.layers[li].weight, lr, momentum);
    sgd_momentum_step(params.layers[li].bias, grads.layers[li].bias, velocity.layers[li].bias, lr,
                      momentum);
  }
}

double TrainConfig::lr_at(int iteration) const {
  double lr = schedule.front().lr;
  for (const LrStep& s : schedule) {
    if (iteration >= s.from_iteration) lr = s.lr;
  }
  return lr;
}

void validate(const TrainConfig& cfg) {
  if (cfg.schedule.empty()) throw InvalidSize("learning-rate schedule is empty");
  for (size_t i = 0; i < cfg.schedule.size(); ++i) {
    if (!(cfg.schedule[i].lr >= 0.0) || !std::isfinite(cfg.schedule[i].lr)) {
      throw InvalidSize("learning rates must be finite and non-negative");
    }
    if (i > 0 && cfg.schedule[i].from_iteration <= cfg.schedule[i - 1].from_iteration) {
      throw InvalidSize("learning-rate schedule must be sorted by iteration");
    }
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw InvalidSize("momentum must lie in [0, 1)");
  }
  if (cfg.batch_size < 1) throw InvalidSize("batch size must be positive");
  if (cfg.iterations < 0) throw InvalidSize("iteration count must be non-negative");
  if (cfg.augment) validate(cfg.augment_config);
}

namespace {

struct Sample {
  LayerPyramid pyramid;
  FeatureMaps features;
  GroundTruthMaps gt;
};

Sample make_sample(const Scene& scene, const TrainConfig& cfg) {
  Sample s;
  s.pyramid = build_pyramid(scene.pyramid_config(cfg.strides, cfg.gamma));
  s.features = compute_features(scene, s.pyramid);
  s.gt = encode(scene.words, s.pyramid);
  return s;
}

}  // namespace

TrainResult train_toy(std::span<const Scene> scenes, const TrainConfig& cfg) {
  validate(cfg);
  if (scenes.empty()) throw InvalidSize("training needs at least one scene");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<size_t> pick(0, scenes.size() - 1);

  TrainResult result;
  result.predictor = ToyPredictor::zeros();
  ToyPredictor velocity = ToyPredictor::zeros();
  std::vector<Sample> batch;
  std::vector<LogitMaps> logits;
  std::vector<GroundTruthMaps> gts;

  for (int it = 0; it < cfg.iterations; ++it) {
    batch.clear();
    logits.clear();
    gts.clear();
    for (int b = 0; b < cfg.batch_size; ++b) {
      const Scene& source = scenes[pick(rng)];
      const Scene scene = cfg.augment ? random_crop(source, cfg.augment_config, rng) : source;
      batch.push_back(make_sample(scene, cfg));
      logits.push_back(forward(result.predictor, batch.back().features, batch.back().pyramid));
      gts.push_back(batch.back().gt);
    }
    const MinedMask mask = mine(logits, gts, cfg.loss);
    const LossBreakdown loss = evaluate_loss(logits, gts, mask, cfg.loss);
    if (!std::isfinite(loss.total)) {
      throw TrainingDiverged("non-finite loss at iteration " + std::to_string(it));
    }
    result.loss_trace.push_back(loss.total);

    const auto grads = loss_gradient(logits, gts, mask, cfg.loss);
    ToyPredictor param_grad = ToyPredictor::zeros();
    for (size_t b = 0; b < batch.size(); ++b) accumulate(param_grad, backward(batch[b].features, grads[b]));
    sgd_momentum_step(result.predictor, param_grad, velocity, cfg.lr_at(it), cfg.momentum);
    if (!result.predictor.finite()) {
      throw TrainingDiverged("non-finite parameters at iteration " + std::to_string(it));
    }
  }
  return result;
}

double dataset_loss(const ToyPredictor& model, std::span<const Scene> scenes,
                    const TrainConfig& cfg) {
  if (scenes.empty()) return 0.0;
  double sum = 0.0;
  int groups = 0;
  const size_t bs = static_cast<size_t>(std::max(1, cfg.batch_size));
  for (size_t start = 0; start < scenes.size(); start += bs) {
    std::vector<LogitMaps> logits;
    std::vector<GroundTruthMaps> gts;
    for (size_t i = start; i < std::min(scenes.size(), start + bs); ++i) {
      Sample s = make_sample(scenes[i], cfg);
      logits.push_back(forward(model, s.features, s.pyramid));
      gts.push_back(std::move(s.gt));
    }
    sum += total_loss(logits, gts, cfg.loss).total;
    ++groups;
  }
  return sum / groups;
}

PredictionMaps predict(const ToyPredictor& model, const Scene& scene, const LayerPyramid& p) {
  return to_probabilities(forward(model, compute_features(scene, p), p));
}

}  // namespace seglink
