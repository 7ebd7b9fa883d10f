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

#include "seglink/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seglink/errors.hpp"

namespace seglink {

namespace {

int links_per_cell(int l) { return kWithinSlots + (l > 1 ? kCrossSlots : 0); }

int link_channel_neg(int slot) {
  return slot < kWithinSlots ? channel::within_neg(slot) : channel::cross_neg(slot - kWithinSlots);
}

std::uint8_t link_label(const GroundTruthLayer& g, size_t cell, int slot) {
  return slot < kWithinSlots ? g.within_link[cell * kWithinSlots + static_cast<size_t>(slot)]
                             : g.cross_link[cell * kCrossSlots +
                                            static_cast<size_t>(slot - kWithinSlots)];
}

void check_pair(const LogitMaps& pred, const GroundTruthMaps& gt) {
  if (pred.layers.size() != gt.layers.size()) {
    throw ShapeError("prediction has " + std::to_string(pred.layers.size()) +
                     " layers, groundtruth has " + std::to_string(gt.layers.size()));
  }
  for (size_t i = 0; i < gt.layers.size(); ++i) {
    const LayerTensor& t = pred.layers[i];
    const GroundTruthLayer& g = gt.layers[i];
    if (t.l != g.l || t.w != g.w || t.h != g.h || t.c != channel::count(g.l) ||
        t.data.size() != static_cast<size_t>(t.w) * t.h * t.c) {
      throw ShapeError("prediction layer " + std::to_string(t.l) +
                       " does not match its groundtruth shape");
    }
  }
}

void check_batch(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts) {
  if (preds.size() != gts.size()) throw ShapeError("batch sizes differ");
  for (size_t b = 0; b < preds.size(); ++b) check_pair(preds[b], gts[b]);
}

// Start of each (image, layer) block in the flattened sample arrays.
struct SampleLayout {
  std::vector<size_t> seg_base;
  std::vector<size_t> link_base;
  size_t seg_total = 0;
  size_t link_total = 0;

};

SampleLayout layout_of(std::span<const GroundTruthMaps> gts) {
  SampleLayout s;
  for (const auto& gt : gts) {
    for (const auto& g : gt.layers) {
      s.seg_base.push_back(s.seg_total);
      s.link_base.push_back(s.link_total);
      s.seg_total += static_cast<size_t>(g.w) * g.h;
      s.link_total += static_cast<size_t>(g.w) * g.h * links_per_cell(g.l);
    }
  }
  return s;
}

LogitPair pair_at(const LayerTensor& t, size_t cell, int neg_channel) {
  const size_t base = cell * static_cast<size_t>(t.c) + static_cast<size_t>(neg_channel);
  return {t.data[base], t.data[base + 1]};
}

std::array<double, 2> softmax(const LogitPair& z) {
  return {1.0 / (1.0 + std::exp(z[1] - z[0])), 1.0 / (1.0 + std::exp(z[0] - z[1]))};
}

}  // namespace

double softmax_loss(const LogitPair& z, int label) {
  const double m = std::max(z[0], z[1]);
  const double lse = m + std::log1p(std::exp(-std::abs(z[0] - z[1])));
  return lse - z[static_cast<size_t>(label != 0)];
}

double softmax_conf_loss(std::span<const LogitPair> logits, std::span<const std::uint8_t> labels,
                         std::span<const std::uint8_t> mask) {
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) sum += softmax_loss(logits[i], labels[i]);
  }
  return sum;
}

double smooth_l1(double d) {
  const double a = std::abs(d);
  return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

double smooth_l1_grad(double d) { return std::clamp(d, -1.0, 1.0); }

double smooth_l1_loss(std::span<const Offsets> pred, std::span<const Offsets> target,
                      std::span<const std::uint8_t> mask) {
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!mask[i]) continue;
    for (size_t k = 0; k < 5; ++k) sum += smooth_l1(pred[i][k] - target[i][k]);
  }
  return sum;
}

std::vector<std::uint8_t> mine_hard_negatives(std::span<const double> losses,
                                              std::span<const std::uint8_t> labels, double ratio) {
  std::vector<std::uint8_t> keep(labels.size(), 0);
  std::vector<size_t> negatives;
  size_t positives = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      keep[i] = 1;
      ++positives;
    } else {
      negatives.push_back(i);
    }
  }
  const size_t cap = static_cast<size_t>(std::floor(ratio * static_cast<double>(positives)));
  const size_t k = std::min(cap, negatives.size());
  std::partial_sort(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(k),
                    negatives.end(), [&](size_t a, size_t b) {
                      return losses[a] > losses[b] || (losses[a] == losses[b] && a < b);
                    });
  for (size_t i = 0; i < k; ++i) keep[negatives[i]] = 1;
  return keep;
}

MinedMask mine(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts,
               const LossConfig& cfg) {
  check_batch(preds, gts);
  const SampleLayout lay = layout_of(gts);
  std::vector<double> seg_loss(lay.seg_total), link_loss(lay.link_total);
  std::vector<std::uint8_t> seg_label(lay.seg_total), link_label_flat(lay.link_total);

  size_t next_block = 0;
  for (size_t b = 0; b < gts.size(); ++b) {
    for (size_t li = 0; li < gts[b].layers.size(); ++li) {
      const GroundTruthLayer& g = gts[b].layers[li];
      const LayerTensor& t = preds[b].layers[li];
      const size_t blk = next_block++;
      const size_t sb = lay.seg_base[blk];
      const size_t lb = lay.link_base[blk];
      const int per = links_per_cell(g.l);
      const int cells = g.w * g.h;
#pragma omp parallel for schedule(static)
      for (int c = 0; c < cells; ++c) {
        const size_t cell = static_cast<size_t>(c);
        const int label = g.seg_label[cell];
        seg_label[sb + cell] = static_cast<std::uint8_t>(label);
        seg_loss[sb + cell] = softmax_loss(pair_at(t, cell, channel::kSegNeg), label);
        for (int k = 0; k < per; ++k) {
          const size_t j = lb + cell * static_cast<size_t>(per) + static_cast<size_t>(k);
          const int ll = link_label(g, cell, k);
          link_label_flat[j] = static_cast<std::uint8_t>(ll);
          link_loss[j] = softmax_loss(pair_at(t, cell, link_channel_neg(k)), ll);
        }
      }
    }
  }
  return {mine_hard_negatives(seg_loss, seg_label, cfg.neg_ratio),
          mine_hard_negatives(link_loss, link_label_flat, cfg.neg_ratio)};
}

LossBreakdown evaluate_loss(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts,
                            const MinedMask& mask, const LossConfig& cfg) {
  check_batch(preds, gts);
  const SampleLayout lay = layout_of(gts);
  if (mask.seg.size() != lay.seg_total || mask.link.size() != lay.link_total) {
    throw ShapeError("mining mask does not match the batch");
  }
  LossBreakdown r;
  size_t next_block = 0;
  for (size_t b = 0; b < gts.size(); ++b) {
    for (size_t li = 0; li < gts[b].layers.size(); ++li) {
      const GroundTruthLayer& g = gts[b].layers[li];
      const LayerTensor& t = preds[b].layers[li];
      const size_t blk = next_block++;
      const size_t sb = lay.seg_base[blk];
      const size_t lb = lay.link_base[blk];
      const int per = links_per_cell(g.l);
      const size_t cells = static_cast<size_t>(g.w) * g.h;
      for (size_t cell = 0; cell < cells; ++cell) {
        const int label = g.seg_label[cell];
        if (mask.seg[sb + cell]) r.seg_conf += softmax_loss(pair_at(t, cell, channel::kSegNeg), label);
        if (label) {
          ++r.n_pos_seg;
          const size_t base = cell * static_cast<size_t>(t.c) + channel::kOffset;
          for (size_t k = 0; k < 5; ++k) r.loc += smooth_l1(t.data[base + k] - g.offsets[cell][k]);
        }
        for (int k = 0; k < per; ++k) {
          const size_t j = lb + cell * static_cast<size_t>(per) + static_cast<size_t>(k);
          const int ll = link_label(g, cell, k);
          r.n_pos_link += static_cast<size_t>(ll);
          if (mask.link[j]) r.link_conf += softmax_loss(pair_at(t, cell, link_channel_neg(k)), ll);
        }
      }
    }
  }
  if (r.n_pos_seg > 0) {
    const double ns = static_cast<double>(r.n_pos_seg);
    r.total += r.seg_conf / ns + cfg.lambda_loc * r.loc / ns;
  }
  if (r.n_pos_link > 0) {
    r.total += cfg.lambda_link * r.link_conf / static_cast<double>(r.n_pos_link);
  }
  return r;
}

LossBreakdown total_loss(std::span<const LogitMaps> preds, std::span<const GroundTruthMaps> gts,
                         const LossConfig& cfg) {
  return evaluate_loss(preds, gts, mine(preds, gts, cfg), cfg);
}

LossBreakdown total_loss(const LogitMaps& pred, const GroundTruthMaps& gt, const LossConfig& cfg) {
  return total_loss(std::span<const LogitMaps>(&pred, 1), std::span<const GroundTruthMaps>(&gt, 1),
                    cfg);
}

std::vector<LogitMaps> loss_gradient(std::span<const LogitMaps> preds,
                                     std::span<const GroundTruthMaps> gts, const MinedMask& mask,
                                     const LossConfig& cfg) {
  check_batch(preds, gts);
  const SampleLayout lay = layout_of(gts);
  if (mask.seg.size() != lay.seg_total || mask.link.size() != lay.link_total) {
    throw ShapeError("mining mask does not match the batch");
  }
  size_t n_seg = 0, n_link = 0;
  for (const auto& gt : gts) {
    n_seg += gt.positive_segments();
    n_link += gt.positive_links();
  }
  const double seg_scale = n_seg > 0 ? 1.0 / static_cast<double>(n_seg) : 0.0;
  const double loc_scale = cfg.lambda_loc * seg_scale;
  const double link_scale = n_link > 0 ? cfg.lambda_link / static_cast<double>(n_link) : 0.0;

  std::vector<LogitMaps> grads;
  size_t next_block = 0;
  for (size_t b = 0; b < gts.size(); ++b) {
    LogitMaps grad;
    for (size_t li = 0; li < gts[b].layers.size(); ++li) {
      const GroundTruthLayer& g = gts[b].layers[li];
      const LayerTensor& t = preds[b].layers[li];
      LayerTensor out(t.l, t.w, t.h, t.c);
      const size_t blk = next_block++;
      const size_t sb = lay.seg_base[blk];
      const size_t lb = lay.link_base[blk];
      const int per = links_per_cell(g.l);
      const int cells = g.w * g.h;
#pragma omp parallel for schedule(static)
      for (int c = 0; c < cells; ++c) {
        const size_t cell = static_cast<size_t>(c);
        const size_t base = cell * static_cast<size_t>(t.c);
        const int label = g.seg_label[cell];
        if (mask.seg[sb + cell]) {
          const auto p = softmax(pair_at(t, cell, channel::kSegNeg));
          out.data[base + channel::kSegNeg] = seg_scale * (p[0] - (label == 0));
          out.data[base + channel::kSegPos] = seg_scale * (p[1] - (label == 1));
        }
        if (label) {
          for (size_t k = 0; k < 5; ++k) {
            const size_t ch = base + channel::kOffset + k;
            out.data[ch] = loc_scale * smooth_l1_grad(t.data[ch] - g.offsets[cell][k]);
          }
        }
        for (int k = 0; k < per; ++k) {
          if (!mask.link[lb + cell * static_cast<size_t>(per) + static_cast<size_t>(k)]) continue;
          const int ll = link_label(g, cell, k);
          const int neg = link_channel_neg(k);
          const auto p = softmax(pair_at(t, cell, neg));
          out.data[base + static_cast<size_t>(neg)] = link_scale * (p[0] - (ll == 0));
          out.data[base + static_cast<size_t>(neg) + 1] = link_scale * (p[1] - (ll == 1));
        }
      }
      grad.layers.push_back(std::move(out));
    }
    grads.push_back(std::move(grad));
  }
  return grads;
}

}  // namespace seglink
