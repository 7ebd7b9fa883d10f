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

#include "seglink/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <tuple>

#include "seglink/errors.hpp"

namespace seglink {

namespace {

void check_thresholds(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw InvalidPrediction("thresholds must lie in [0, 1]");
  }
}

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

void check_score(double v, GridIndex i) {
  if (!is_probability(v)) {
    throw InvalidPrediction("score at layer " + std::to_string(i.l) + " (" + std::to_string(i.x) +
                            ", " + std::to_string(i.y) + ") is not a probability");
  }
}

void sort_edges(std::vector<SegmentEdge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const SegmentEdge& x, const SegmentEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
}

// Score of the undirected within-layer link between `lower` and the
// neighbor in `slot`, always averaged from the lower-indexed endpoint.
double within_link_score(const PredictionMaps& m, GridIndex lower, GridIndex upper, int slot) {
  return 0.5 * (m.within_score(lower, slot) + m.within_score(upper, opposite_within_slot(slot)));
}

}  // namespace

RotatedRect decode_segment(const Offsets& o, const RotatedRect& d) {
  for (double v : o) {
    if (!std::isfinite(v)) throw InvalidPrediction("non-finite segment offsets");
  }
  const double a = d.w;
  const double w = a * std::exp(o[2]);
  const double h = a * std::exp(o[3]);
  if (!std::isfinite(w) || !std::isfinite(h) || !(w > 0.0) || !(h > 0.0)) {
    throw InvalidPrediction("segment size offsets overflow");
  }
  return RotatedRect(a * o[0] + d.x, a * o[1] + d.y, w, h, o[4]);
}

SegmentGraph build_graph(const PredictionMaps& m, const LayerPyramid& p, double alpha,
                         double beta) {
  check_thresholds(alpha, beta);
  m.check_shape(p);

  // Pass 1: per-row survivor counts, giving every kept cell a stable id.
  std::vector<std::vector<int>> ids(static_cast<size_t>(p.num_layers()));
  std::vector<int> layer_base(static_cast<size_t>(p.num_layers()) + 1, 0);
  for (const LayerSpec& s : p.layers()) {
    auto& id = ids[static_cast<size_t>(s.l - 1)];
    id.assign(static_cast<size_t>(s.cells()), -1);
    std::vector<int> row_count(static_cast<size_t>(s.h), 0);
    std::vector<std::exception_ptr> errors(static_cast<size_t>(s.h));
#pragma omp parallel for schedule(static)
    for (int y = 0; y < s.h; ++y) {
      try {
        for (int x = 0; x < s.w; ++x) {
          const double v = m.seg_score({s.l, x, y});
          check_score(v, {s.l, x, y});
          if (v >= alpha) {
            id[static_cast<size_t>(y) * s.w + x] = 0;
            ++row_count[static_cast<size_t>(y)];
          }
        }
      } catch (...) {
        errors[static_cast<size_t>(y)] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    int next = layer_base[static_cast<size_t>(s.l - 1)];
    std::vector<int> row_base(static_cast<size_t>(s.h));
    for (int y = 0; y < s.h; ++y) {
      row_base[static_cast<size_t>(y)] = next;
      next += row_count[static_cast<size_t>(y)];
    }
    layer_base[static_cast<size_t>(s.l)] = next;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < s.h; ++y) {
      int k = row_base[static_cast<size_t>(y)];
      for (int x = 0; x < s.w; ++x) {
        int& v = id[static_cast<size_t>(y) * s.w + x];
        if (v == 0) v = k++;
      }
    }
  }

  // Pass 2: decode kept segments and collect links row by row.
  SegmentGraph g;
  g.nodes.resize(static_cast<size_t>(layer_base.back()));
  for (const LayerSpec& s : p.layers()) {
    const auto& id = ids[static_cast<size_t>(s.l - 1)];
    const std::vector<int>* finer = s.l > 1 ? &ids[static_cast<size_t>(s.l - 2)] : nullptr;
    const int finer_w = s.l > 1 ? p.layer(s.l - 1).w : 0;
    std::vector<std::vector<SegmentEdge>> row_edges(static_cast<size_t>(s.h));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(s.h));
#pragma omp parallel for schedule(static)
    for (int y = 0; y < s.h; ++y) {
      try {
        auto& edges = row_edges[static_cast<size_t>(y)];
        for (int x = 0; x < s.w; ++x) {
          const int node = id[static_cast<size_t>(y) * s.w + x];
          if (node < 0) continue;
          const GridIndex here{s.l, x, y};
          const RotatedRect d = default_box(p, here);
          g.nodes[static_cast<size_t>(node)] =
              SegmentNode{here, decode_segment(m.layer(s.l).offsets(x, y), d), m.seg_score(here)};
          // Forward half of the neighborhood; the other half is covered by
          // the neighbor that precedes us.
          for (int k = kWithinSlots / 2; k < kWithinSlots; ++k) {
            const auto n = within_neighbor(here, s, k);
            if (!n) continue;
            const int other = id[static_cast<size_t>(n->y) * s.w + n->x];
            if (other < 0) continue;
            const double score = within_link_score(m, here, *n, k);
            if (score >= beta) edges.push_back({node, other, score, LinkKind::kWithin});
          }
          if (finer) {
            for (int k = 0; k < kCrossSlots; ++k) {
              const GridIndex n = cross_neighbor(here, k);
              const int other = (*finer)[static_cast<size_t>(n.y) * finer_w + n.x];
              if (other < 0) continue;
              const double score = m.cross_score(here, k);
              if (score >= beta) edges.push_back({other, node, score, LinkKind::kCross});
            }
          }
        }
      } catch (...) {
        errors[static_cast<size_t>(y)] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (auto& edges : row_edges) g.edges.insert(g.edges.end(), edges.begin(), edges.end());
  }
  sort_edges(g.edges);
  return g;
}

SegmentGraph build_graph_serial(const PredictionMaps& m, const LayerPyramid& p, double alpha,
                                double beta) {
  check_thresholds(alpha, beta);
  m.check_shape(p);
  SegmentGraph g;
  std::vector<std::vector<int>> ids;
  for (const LayerSpec& s : p.layers()) {
    std::vector<int> id(static_cast<size_t>(s.cells()), -1);
    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        const GridIndex here{s.l, x, y};
        const double v = m.seg_score(here);
        check_score(v, here);
        if (v < alpha) continue;
        id[static_cast<size_t>(y) * s.w + x] = static_cast<int>(g.nodes.size());
        g.nodes.push_back(
            {here, decode_segment(m.layer(s.l).offsets(x, y), default_box(p, here)), v});
      }
    }
    ids.push_back(std::move(id));
  }
  for (size_t node = 0; node < g.nodes.size(); ++node) {
    const GridIndex here = g.nodes[node].idx;
    const LayerSpec& s = p.layer(here.l);
    const auto& id = ids[static_cast<size_t>(here.l - 1)];
    for (int k = 0; k < kWithinSlots; ++k) {
      const auto n = within_neighbor(here, s, k);
      if (!n) continue;
      const int other = id[static_cast<size_t>(n->y) * s.w + n->x];
      if (other <= static_cast<int>(node)) continue;
      const double score = within_link_score(m, here, *n, k);
      if (score >= beta) g.edges.push_back({static_cast<int>(node), other, score, LinkKind::kWithin});
    }
    if (here.l == 1) continue;
    const LayerSpec& fs = p.layer(here.l - 1);
    for (int k = 0; k < kCrossSlots; ++k) {
      const GridIndex n = cross_neighbor(here, k);
      const int other = ids[static_cast<size_t>(here.l - 2)][static_cast<size_t>(n.y) * fs.w + n.x];
      if (other < 0) continue;
      const double score = m.cross_score(here, k);
      if (score >= beta) g.edges.push_back({other, static_cast<int>(node), score, LinkKind::kCross});
    }
  }
  sort_edges(g.edges);
  return g;
}

std::vector<std::vector<int>> connected_components(const SegmentGraph& g) {
  const size_t n = g.nodes.size();
  std::vector<int> degree(n + 1, 0);
  for (const auto& e : g.edges) {
    ++degree[static_cast<size_t>(e.a) + 1];
    ++degree[static_cast<size_t>(e.b) + 1];
  }
  for (size_t i = 1; i <= n; ++i) degree[i] += degree[i - 1];
  std::vector<int> adjacency(static_cast<size_t>(degree[n]));
  std::vector<int> fill(degree.begin(), degree.end() - 1);
  for (const auto& e : g.edges) {
    adjacency[static_cast<size_t>(fill[static_cast<size_t>(e.a)]++)] = e.b;
    adjacency[static_cast<size_t>(fill[static_cast<size_t>(e.b)]++)] = e.a;
  }

  std::vector<std::vector<int>> components;
  std::vector<bool> seen(n, false);
  std::vector<int> stack;
  for (size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<int> members;
    stack.push_back(static_cast<int>(start));
    seen[start] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (int j = degree[static_cast<size_t>(v)]; j < degree[static_cast<size_t>(v) + 1]; ++j) {
        const int w = adjacency[static_cast<size_t>(j)];
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

RotatedRect combine_segments(std::span<const RotatedRect> input) {
  if (input.empty()) throw InvalidSegment("cannot combine an empty component");
  std::vector<RotatedRect> segs(input.begin(), input.end());
  std::sort(segs.begin(), segs.end(), [](const RotatedRect& a, const RotatedRect& b) {
    return std::tie(a.x, a.y, a.w, a.h, a.theta) < std::tie(b.x, b.y, b.w, b.h, b.theta);
  });

  const double n = static_cast<double>(segs.size());
  double theta_sum = 0.0, h_sum = 0.0, cx = 0.0, cy = 0.0;
  for (const auto& s : segs) {
    theta_sum += s.theta;
    h_sum += s.h;
    cx += s.x;
    cy += s.y;
  }
  const double theta = theta_sum / n;
  const Point centroid{cx / n, cy / n};
  const Point dir{std::cos(theta), std::sin(theta)};

  size_t lo = 0, hi = 0;
  double tmin = 0.0, tmax = 0.0;
  for (size_t i = 0; i < segs.size(); ++i) {
    const double t = dot(segs[i].center() - centroid, dir);
    if (i == 0 || t < tmin) {
      tmin = t;
      lo = i;
    }
    if (i == 0 || t > tmax) {
      tmax = t;
      hi = i;
    }
  }
  if (lo == hi && segs.size() > 1) {
    lo = 0;
    hi = 1;
  }
  const Point p = centroid + tmin * dir;
  const Point q = centroid + tmax * dir;
  const double span = std::hypot(q.x - p.x, q.y - p.y);
  const double width = span + 0.5 * (segs[lo].w + segs[hi].w);
  const Point mid = 0.5 * (p + q);
  return RotatedRect(mid.x, mid.y, width, h_sum / n, theta);
}

bool angle_wraps(std::span<const RotatedRect> segments) {
  if (segments.empty()) return false;
  auto [lo, hi] = std::minmax_element(
      segments.begin(), segments.end(),
      [](const RotatedRect& a, const RotatedRect& b) { return a.theta < b.theta; });
  return hi->theta - lo->theta > kPi / 2;
}

DetectionResult detect_full(const PredictionMaps& maps, const LayerPyramid& p, double alpha,
                            double beta, bool parallel) {
  DetectionResult r;
  r.graph = parallel ? build_graph(maps, p, alpha, beta) : build_graph_serial(maps, p, alpha, beta);
  r.components = connected_components(r.graph);
  std::vector<RotatedRect> segs;
  for (const auto& comp : r.components) {
    segs.clear();
    for (int v : comp) segs.push_back(r.graph.nodes[static_cast<size_t>(v)].rect);
    r.boxes.push_back(combine_segments(segs));
    r.wraps.push_back(angle_wraps(segs));
  }
  return r;
}

std::vector<RotatedRect> detect(const PredictionMaps& maps, const LayerPyramid& p, double alpha,
                                double beta) {
  return detect_full(maps, p, alpha, beta).boxes;
}

}  // namespace seglink
