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

#include "seglink/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "seglink/errors.hpp"

namespace seglink {

namespace {

void check_unique_ids(std::span<const WordBox> words) {
  std::set<int> ids;
  for (const auto& w : words) {
    if (w.id < 0) throw InconsistentLabel("word ids must be non-negative");
    if (!ids.insert(w.id).second) {
      throw InconsistentLabel("duplicate word id " + std::to_string(w.id));
    }
  }
}

struct Candidate {
  bool found = false;
  double ratio = 0.0;
  int id = 0;

  bool improved_by(double r, int word_id) const {
    return !found || r < ratio || (r == ratio && word_id < id);
  }
};

BoxLabels empty_labels(const LayerSpec& s) {
  BoxLabels b;
  b.l = s.l;
  b.w = s.w;
  b.h = s.h;
  b.seg_label.assign(static_cast<size_t>(s.cells()), 0);
  b.match_id.assign(static_cast<size_t>(s.cells()), -1);
  return b;
}

Point cell_center(const LayerPyramid& p, const LayerSpec& s, int x, int y) {
  return {static_cast<double>(p.input_w()) / s.w * (x + 0.5),
          static_cast<double>(p.input_h()) / s.h * (y + 0.5)};
}

std::vector<BoxLabels> label_default_boxes_serial(std::span<const WordBox> words,
                                                  const LayerPyramid& p,
                                                  const EncoderConfig& cfg) {
  check_unique_ids(words);
  std::vector<BoxLabels> out;
  for (const LayerSpec& s : p.layers()) {
    BoxLabels b = empty_labels(s);
    std::vector<Candidate> best(static_cast<size_t>(s.cells()));
    for (const WordBox& word : words) {
      const double r = size_ratio(s.a, word.rect.h);
      if (!(r <= cfg.max_size_ratio)) continue;
      for (int y = 0; y < s.h; ++y) {
        for (int x = 0; x < s.w; ++x) {
          const size_t c = static_cast<size_t>(y) * s.w + x;
          if (contains(word.rect, cell_center(p, s, x, y)) && best[c].improved_by(r, word.id)) {
            best[c] = {true, r, word.id};
          }
        }
      }
    }
    for (size_t c = 0; c < best.size(); ++c) {
      if (!best[c].found) continue;
      b.seg_label[c] = 1;
      b.match_id[c] = best[c].id;
    }
    out.push_back(std::move(b));
  }
  return out;
}

GroundTruthMaps assemble(std::span<const WordBox> words, const LayerPyramid& p,
                         std::vector<BoxLabels> labels, bool parallel) {
  std::vector<LinkLabels> links = label_links(labels, p);
  GroundTruthMaps gt;
  for (size_t li = 0; li < labels.size(); ++li) {
    const LayerSpec& s = p.layers()[li];
    GroundTruthLayer g;
    g.l = s.l;
    g.w = s.w;
    g.h = s.h;
    g.seg_label = std::move(labels[li].seg_label);
    g.match_id = std::move(labels[li].match_id);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    g.offsets.assign(static_cast<size_t>(s.cells()), Offsets{nan, nan, nan, nan, nan});
    g.within_link = std::move(links[li].within);
    g.cross_link = std::move(links[li].cross);

#pragma omp parallel for schedule(static) if (parallel)
    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        const size_t c = g.cell(x, y);
        if (!g.seg_label[c]) continue;
        const auto word = std::find_if(words.begin(), words.end(),
                                       [&](const WordBox& w) { return w.id == g.match_id[c]; });
        const RotatedRect d = default_box(p, {s.l, x, y});
        g.offsets[c] = encode_offsets(groundtruth_segment(d, *word), d);
      }
    }
    gt.layers.push_back(std::move(g));
  }
  return gt;
}

}  // namespace

double size_ratio(double a, double word_height) { return std::max(a / word_height, word_height / a); }

std::vector<BoxLabels> label_default_boxes(std::span<const WordBox> words, const LayerPyramid& p,
                                           const EncoderConfig& cfg) {
  check_unique_ids(words);
  std::vector<BoxLabels> out;
  for (const LayerSpec& s : p.layers()) {
    BoxLabels b = empty_labels(s);
    std::vector<const WordBox*> eligible;
    for (const WordBox& word : words) {
      if (size_ratio(s.a, word.rect.h) <= cfg.max_size_ratio) eligible.push_back(&word);
    }
    if (!eligible.empty()) {
#pragma omp parallel for schedule(static)
      for (int y = 0; y < s.h; ++y) {
        for (int x = 0; x < s.w; ++x) {
          const Point center = cell_center(p, s, x, y);
          Candidate best;
          for (const WordBox* word : eligible) {
            if (!contains(word->rect, center)) continue;
            const double r = size_ratio(s.a, word->rect.h);
            if (best.improved_by(r, word->id)) best = {true, r, word->id};
          }
          if (best.found) {
            const size_t c = static_cast<size_t>(y) * s.w + x;
            b.seg_label[c] = 1;
            b.match_id[c] = best.id;
          }
        }
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

RotatedRect groundtruth_segment(const RotatedRect& default_box, const WordBox& word) {
  const Point pivot = default_box.center();
  const double half = 0.5 * default_box.w;
  const double theta = word.rect.theta;
  const Point flat = rotate_point(word.rect.center(), pivot, -theta);
  const double left = std::max(flat.x - 0.5 * word.rect.w, pivot.x - half);
  const double right = std::min(flat.x + 0.5 * word.rect.w, pivot.x + half);
  if (!(right > left)) {
    throw InconsistentLabel("default box at (" + std::to_string(pivot.x) + ", " +
                            std::to_string(pivot.y) + ") does not overlap word " +
                            std::to_string(word.id));
  }
  const Point c = rotate_point({0.5 * (left + right), flat.y}, pivot, theta);
  return RotatedRect(c.x, c.y, right - left, word.rect.h, theta);
}

Offsets encode_offsets(const RotatedRect& segment, const RotatedRect& default_box) {
  if (!(segment.w > 0.0) || !(segment.h > 0.0)) {
    throw InvalidSegment("segment width and height must be positive");
  }
  const double a = default_box.w;
  return {(segment.x - default_box.x) / a, (segment.y - default_box.y) / a,
          std::log(segment.w / a), std::log(segment.h / a), segment.theta};
}

std::vector<LinkLabels> label_links(std::span<const BoxLabels> labels, const LayerPyramid& p) {
  std::vector<LinkLabels> out;
  for (const LayerSpec& s : p.layers()) {
    const BoxLabels& b = labels[static_cast<size_t>(s.l - 1)];
    LinkLabels links;
    links.l = s.l;
    links.within.assign(static_cast<size_t>(s.cells()) * kWithinSlots, 0);
    if (s.l > 1) links.cross.assign(static_cast<size_t>(s.cells()) * kCrossSlots, 0);
    const BoxLabels* finer = s.l > 1 ? &labels[static_cast<size_t>(s.l - 2)] : nullptr;

    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        const size_t c = static_cast<size_t>(y) * s.w + x;
        if (!b.seg_label[c]) continue;
        for (int k = 0; k < kWithinSlots; ++k) {
          const auto n = within_neighbor({s.l, x, y}, s, k);
          if (!n) continue;
          const size_t nc = static_cast<size_t>(n->y) * s.w + n->x;
          links.within[c * kWithinSlots + static_cast<size_t>(k)] =
              b.seg_label[nc] && b.match_id[nc] == b.match_id[c];
        }
        if (finer) {
          for (int k = 0; k < kCrossSlots; ++k) {
            const GridIndex n = cross_neighbor({s.l, x, y}, k);
            const size_t nc = static_cast<size_t>(n.y) * finer->w + n.x;
            links.cross[c * kCrossSlots + static_cast<size_t>(k)] =
                finer->seg_label[nc] && finer->match_id[nc] == b.match_id[c];
          }
        }
      }
    }
    out.push_back(std::move(links));
  }
  return out;
}

GroundTruthMaps encode(std::span<const WordBox> words, const LayerPyramid& p,
                       const EncoderConfig& cfg) {
  return assemble(words, p, label_default_boxes(words, p, cfg), true);
}

GroundTruthMaps encode_serial(std::span<const WordBox> words, const LayerPyramid& p,
                              const EncoderConfig& cfg) {
  return assemble(words, p, label_default_boxes_serial(words, p, cfg), false);
}

}  // namespace seglink
