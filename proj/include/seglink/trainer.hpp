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

#include "seglink/augment.hpp"
#include "seglink/loss.hpp"
#include "seglink/maps.hpp"
#include "seglink/scene.hpp"

namespace seglink {

/// Per-pixel quantities summed by SceneRaster: occupancy, then for covered
/// pixels sin 2theta, cos 2theta, log h and (log h)^2 of the covering word.
struct RasterSums {
  double occupancy = 0.0;
  double sin2 = 0.0;
  double cos2 = 0.0;
  double log_h = 0.0;
  double log_h_sq = 0.0;
};

/// Word mask of a scene at input resolution, kept as one interleaved
/// summed-area table. A pixel is covered when its center lies in a word;
/// the first word listed wins on overlap.
class SceneRaster {
 public:
  explicit SceneRaster(const Scene& scene);

  int width() const { return w_; }
  int height() const { return h_; }

  /// Sums over the pixel window [x0, x1) x [y0, y1), clipped to the canvas.
  RasterSums sums(int x0, int y0, int x1, int y1) const;
  double occupancy_sum(int x0, int y0, int x1, int y1) const {
    return sums(x0, y0, x1, y1).occupancy;
  }

 private:
  int w_ = 0;
  int h_ = 0;
  std::vector<RasterSums> table_;
};

/// Feature layout per cell, with a the default-box side:
///   [0, 3)   occupancy over windows a, 2a, 4a
///   [3, 5)   mean sin 2theta, cos 2theta of covered pixels in the 2a window
///   5        bias (1)
///   6        occupancy of the 2 x 2 pixel window at the cell center
///   [7, 15)  same at the 8 within-layer neighbor centers, slot order
///   [15, 19) same at the 4 cross-layer neighbor centers; zero on layer 1
///   [19, 21) mean log(h / a) and mean log(h / a)^2 of covered pixels in the
///            2a window, h being the covering word's height
inline constexpr int kFeatureDim = 21;
inline constexpr int kBiasFeature = 5;
using CellFeatures = std::array<double, kFeatureDim>;

CellFeatures cell_features(const SceneRaster& raster, const LayerPyramid& p, GridIndex idx);

/// Features of every cell, one row-major block per layer.
struct FeatureMaps {
  std::vector<std::vector<CellFeatures>> layers;
};
FeatureMaps compute_features(const Scene& scene, const LayerPyramid& p);

struct LayerParams {
  int l = 1;
  int channels = 0;
  std::vector<double> weight;  ///< kFeatureDim x channels, row-major
  std::vector<double> bias;    ///< channels

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Per-layer linear map from cell features to predictor channels.
struct ToyPredictor {
  std::vector<LayerParams> layers;

  static ToyPredictor zeros();
  bool finite() const;

  friend bool operator==(const ToyPredictor&, const ToyPredictor&) = default;
};

LogitMaps forward(const ToyPredictor& model, const FeatureMaps& features, const LayerPyramid& p);

/// Gradient of the parameters given gradients on the logits. Reduction runs
/// over fixed-size chunks of cells summed in order, so the result does not
/// depend on the thread count.
ToyPredictor backward(const FeatureMaps& features, const LogitMaps& logit_grad);

/// Accumulates `g` into `acc`.
void accumulate(ToyPredictor& acc, const ToyPredictor& g);

/// v <- momentum * v - lr * g;  p <- p + v
void sgd_momentum_step(std::span<double> params, std::span<const double> grads,
                       std::span<double> velocity, double lr, double momentum);
void sgd_momentum_step(ToyPredictor& params, const ToyPredictor& grads, ToyPredictor& velocity,
                       double lr, double momentum);

struct LrStep {
  int from_iteration = 0;
  double lr = 0.0;
};

struct TrainConfig {
  /// Piecewise-constant learning rate, sorted by from_iteration.
  std::vector<LrStep> schedule = {{0, 0.2}, {1000, 0.05}, {1600, 0.01}};
  double momentum = 0.9;
  int batch_size = 8;
  int iterations = 2000;
  std::uint64_t seed = 0;
  bool augment = true;
  AugmentConfig augment_config{};
  LossConfig loss{};
  std::array<int, kNumLayers> strides = kDefaultStrides;
  double gamma = kDefaultGamma;

  double lr_at(int iteration) const;
};

/// Throws InvalidSize on a malformed config (negative lr, momentum
/// outside [0, 1), empty schedule, non-positive batch).
void validate(const TrainConfig& cfg);

struct TrainResult {
  ToyPredictor predictor;
  std::vector<double> loss_trace;  ///< batch total loss per iteration
};

/// Momentum SGD over random batches: crop, encode, forward, mine, backprop.
/// Fully determined by cfg.seed. Throws TrainingDiverged on a non-finite
/// loss.
TrainResult train_toy(std::span<const Scene> scenes, const TrainConfig& cfg);

/// Mean batch loss over the scenes at native resolution (no cropping),
/// mining within consecutive groups of `batch_size` scenes.
double dataset_loss(const ToyPredictor& model, std::span<const Scene> scenes,
                    const TrainConfig& cfg);

PredictionMaps predict(const ToyPredictor& model, const Scene& scene, const LayerPyramid& p);

}  // namespace seglink
