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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seglink/maps.hpp"

namespace seglink {

struct LossConfig {
  double lambda_loc = 1.0;
  double lambda_link = 1.0;
  /// Cap on mined negatives per positive.
  double neg_ratio = 3.0;
};

/// Raw (unnormalized) sums plus the normalized objective
///   total = seg_conf / N_s + lambda_loc * loc / N_s + lambda_link * link_conf / N_l
/// where a term with a zero normalizer contributes 0.
struct LossBreakdown {
  double seg_conf = 0.0;
  double loc = 0.0;
  double link_conf = 0.0;
  double total = 0.0;
  std::size_t n_pos_seg = 0;
  std::size_t n_pos_link = 0;
};

/// Inclusion flags over the flattened samples of a batch. Segment samples
/// run over (image, layer, row, column); link samples over (image, layer,
/// row, column, slot) with 8 within-layer slots followed by 4 cross-layer
/// slots on layers 2..6.
struct MinedMask {
  std::vector<std::uint8_t> seg;
  std::vector<std::uint8_t> link;
};

using LogitPair = std::array<double, 2>;  ///< (neg, pos)

/// -log softmax(z)[label], computed stably.
double softmax_loss(const LogitPair& z, int label);

double softmax_conf_loss(std::span<const LogitPair> logits, std::span<const std::uint8_t> labels,
                         std::span<const std::uint8_t> mask);

double smooth_l1(double d);
double smooth_l1_grad(double d);

double smooth_l1_loss(std::span<const Offsets> pred, std::span<const Offsets> target,
                      std::span<const std::uint8_t> mask);

/// Keeps every positive and the min(ratio * #pos, #neg) negatives with the
/// largest loss (ties to the lower index).
std::vector<std::uint8_t> mine_hard_negatives(std::span<const double> losses,
                                              std::span<const std::uint8_t> labels,
                                              double ratio = 3.0);

/// Mining is pooled over the whole batch, separately for segments and links.
MinedMask mine(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts,
               const LossConfig& cfg = {});

/// Loss under a fixed mask. Throws ShapeError on mismatched inputs.
LossBreakdown evaluate_loss(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts,
                            const MinedMask& mask, const LossConfig& cfg = {});

/// mine() followed by evaluate_loss().
LossBreakdown total_loss(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts,
                         const LossConfig& cfg = {});
LossBreakdown total_loss(const LogitMaps& pred, const GroundTruthMaps& gt,
                         const LossConfig& cfg = {});

/// d total / d every predicted channel, with the mask held constant.
std::vector<LogitMaps> loss_gradient(std::span<const LogitMaps> preds,
                                     std::span<const GroundTruthMaps> gts, const MinedMask& mask,
                                     const LossConfig& cfg = {});

}  // namespace seglink
