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

#include "seglink/synth.hpp"

#include <cmath>
#include <random>

#include "seglink/encoder.hpp"
#include "seglink/errors.hpp"

namespace seglink {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool inside_canvas(const RotatedRect& r, int w, int h) {
  const AlignedBox b = axis_aligned_bbox(r);
  return b.xmin >= 0.0 && b.ymin >= 0.0 && b.xmax <= w && b.ymax <= h;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed) {
  Scene s;
  s.canvas_w = cfg.canvas_w;
  s.canvas_h = cfg.canvas_h;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  const int count = cfg.max_words > cfg.min_words
                        ? std::uniform_int_distribution<int>(cfg.min_words, cfg.max_words)(rng)
                        : cfg.min_words;
  for (int i = 0; i < count; ++i) {
    for (int attempt = 0; attempt < cfg.retry_budget; ++attempt) {
      const double h = uniform(rng, cfg.min_height, cfg.max_height);
      const double w = h * uniform(rng, cfg.min_aspect, cfg.max_aspect);
      const double theta = uniform(rng, cfg.min_theta, cfg.max_theta);
      const double x = uniform(rng, 0.0, cfg.canvas_w);
      const double y = uniform(rng, 0.0, cfg.canvas_h);
      const RotatedRect r(x, y, w, h, theta);
      if (!inside_canvas(r, cfg.canvas_w, cfg.canvas_h)) continue;
      bool ok = true;
      for (const WordBox& other : s.words) {
        if (std::hypot(other.rect.x - x, other.rect.y - y) < cfg.min_separation ||
            intersection_area(other.rect, r) > 0.0) {
          ok = false;
          break;
        }
      }
      if (ok) {
        s.words.push_back({r, static_cast<int>(s.words.size())});
        break;
      }
    }
  }
  return s;
}

Scene parallel_pair_scene(int canvas_w, int canvas_h, double word_w, double word_h, double theta,
                          double gap, std::uint64_t seed) {
  Scene s;
  s.canvas_w = canvas_w;
  s.canvas_h = canvas_h;
  s.seed = seed;
  const Point c{0.5 * canvas_w, 0.5 * canvas_h};
  const Point v{-std::sin(theta), std::cos(theta)};
  const double half = 0.5 * (word_h + gap);
  const Point a = c - half * v;
  const Point b = c + half * v;
  s.words.push_back({RotatedRect(a.x, a.y, word_w, word_h, theta), 0});
  s.words.push_back({RotatedRect(b.x, b.y, word_w, word_h, theta), 1});
  return s;
}

void validate(const NoiseSpec& n) {
  const auto rate = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!rate(n.score_flip_rate) || !rate(n.link_flip_rate) || !(n.score_jitter >= 0.0) ||
      !(n.offset_jitter >= 0.0)) {
    throw InvalidPrediction("noise rates must lie in [0, 1] and spreads must be non-negative");
  }
}

LogitMaps oracle_logits(const Scene& scene, const LayerPyramid& p) {
  const GroundTruthMaps gt = encode(scene.words, p);
  LogitMaps out{gt.to_tensor()};
  for (LayerTensor& t : out.layers) {
    for (int y = 0; y < t.h; ++y) {
      for (int x = 0; x < t.w; ++x) {
        const int pairs = 1 + kWithinSlots + (t.l > 1 ? kCrossSlots : 0);
        for (int k = 0; k < pairs; ++k) {
          const int neg = k == 0 ? channel::kSegNeg : channel::kWithin + 2 * (k - 1);
          const double pos = t.at(x, y, neg + 1);
          t.at(x, y, neg) = pos > 0.5 ? -kOracleLogit : kOracleLogit;
          t.at(x, y, neg + 1) = pos > 0.5 ? kOracleLogit : -kOracleLogit;
        }
      }
    }
  }
  return out;
}

PredictionMaps oracle_predictions(const Scene& scene, const LayerPyramid& p,
                                  const NoiseSpec& noise, std::uint64_t seed) {
  validate(noise);
  PredictionMaps out{encode(scene.words, p).to_tensor()};
  if (noise.is_zero()) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto corrupt = [&](double& neg, double& pos, double flip_rate) {
    bool label = pos > 0.5;
    if (flip_rate > 0.0 && unit(rng) < flip_rate) label = !label;
    double z = label ? kOracleLogit : -kOracleLogit;
    if (noise.score_jitter > 0.0) z += noise.score_jitter * gauss(rng);
    pos = sigmoid(z);
    neg = sigmoid(-z);
  };

  for (LayerTensor& t : out.layers) {
    const int pairs = 1 + kWithinSlots + (t.l > 1 ? kCrossSlots : 0);
    for (int y = 0; y < t.h; ++y) {
      for (int x = 0; x < t.w; ++x) {
        corrupt(t.at(x, y, channel::kSegNeg), t.at(x, y, channel::kSegPos), noise.score_flip_rate);
        if (noise.offset_jitter > 0.0) {
          for (int k = 0; k < 4; ++k) {
            t.at(x, y, channel::kOffset + k) +=
                noise.offset_jitter * (2.0 * unit(rng) - 1.0);
          }
        }
        for (int k = 1; k < pairs; ++k) {
          const int neg = channel::kWithin + 2 * (k - 1);
          corrupt(t.at(x, y, neg), t.at(x, y, neg + 1), noise.link_flip_rate);
        }
      }
    }
  }
  return out;
}

}  // namespace seglink
