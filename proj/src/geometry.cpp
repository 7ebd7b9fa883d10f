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

#include "seglink/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "seglink/errors.hpp"

namespace seglink {

namespace {

constexpr double kDegenerateArea = 1e-12;

auto as_tuple(const RotatedRect& r) { return std::tie(r.x, r.y, r.w, r.h, r.theta); }

}  // namespace

double normalize_angle(double theta) {
  double t = std::remainder(theta, kPi);
  if (t <= -kPi / 2) t += kPi;
  if (t > kPi / 2) t -= kPi;
  return t;
}

RotatedRect::RotatedRect(double cx, double cy, double width, double height, double angle)
    : x(cx), y(cy), w(width), h(height), theta(normalize_angle(angle)) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h) ||
      !std::isfinite(angle)) {
    throw InvalidGeometry("rotated rect has non-finite fields");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw InvalidGeometry("rotated rect needs positive width and height");
  }
}

Point RotatedRect::width_axis() const { return {std::cos(theta), std::sin(theta)}; }
Point RotatedRect::height_axis() const { return {-std::sin(theta), std::cos(theta)}; }

Quad to_quad(const RotatedRect& r) {
  const Point c = r.center();
  const Point u = (0.5 * r.w) * r.width_axis();
  const Point v = (0.5 * r.h) * r.height_axis();
  return Quad{{c - u - v, c + u - v, c + u + v, c - u + v}};
}

double signed_area(std::span<const Point> polygon) {
  const size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < n; ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % n]);
  }
  return 0.5 * twice;
}

std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
  std::vector<Point> output(subject.begin(), subject.end());
  std::vector<Point> input;
  const size_t m = clip.size();
  for (size_t i = 0; i < m && !output.empty(); ++i) {
    const Point a = clip[i];
    const Point edge = clip[(i + 1) % m] - a;
    input.swap(output);
    output.clear();
    const size_t n = input.size();
    for (size_t j = 0; j < n; ++j) {
      const Point p = input[j];
      const Point q = input[(j + 1) % n];
      const double dp = cross(edge, p - a);
      const double dq = cross(edge, q - a);
      if (dp >= 0.0) output.push_back(p);
      if ((dp >= 0.0) != (dq >= 0.0)) {
        output.push_back(p + (dp / (dp - dq)) * (q - p));
      }
    }
  }
  return output;
}

double intersection_area(const RotatedRect& a, const RotatedRect& b) {
  const AlignedBox ba = axis_aligned_bbox(a);
  const AlignedBox bb = axis_aligned_bbox(b);
  if (ba.xmax <= bb.xmin || bb.xmax <= ba.xmin || ba.ymax <= bb.ymin || bb.ymax <= ba.ymin) {
    return 0.0;
  }
  const Quad qa = to_quad(a);
  const Quad qb = to_quad(b);
  const auto poly = clip_convex(qa.vertices, qb.vertices);
  const double area = signed_area(poly);
  return area < kDegenerateArea ? 0.0 : area;
}

double rotated_iou(const RotatedRect& a, const RotatedRect& b) {
  const bool swap = as_tuple(b) < as_tuple(a);
  const RotatedRect& first = swap ? b : a;
  const RotatedRect& second = swap ? a : b;
  const double inter = intersection_area(first, second);
  if (inter <= 0.0) return 0.0;
  const double uni = first.area() + second.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Point rotate_point(Point p, Point pivot, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Point d = p - pivot;
  return {pivot.x + c * d.x - s * d.y, pivot.y + s * d.x + c * d.y};
}

RotatedRect rotate_about(const RotatedRect& r, Point pivot, double angle) {
  const Point c = rotate_point(r.center(), pivot, angle);
  return RotatedRect(c.x, c.y, r.w, r.h, r.theta + angle);
}

AlignedBox axis_aligned_bbox(const RotatedRect& r) {
  const Quad q = to_quad(r);
  AlignedBox box{q.vertices[0].x, q.vertices[0].y, q.vertices[0].x, q.vertices[0].y};
  for (const Point& p : q.vertices) {
    box.xmin = std::min(box.xmin, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.xmax = std::max(box.xmax, p.x);
    box.ymax = std::max(box.ymax, p.y);
  }
  return box;
}

double jaccard(const AlignedBox& a, const AlignedBox& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

bool contains(const RotatedRect& r, Point p) {
  const Point d = p - r.center();
  return std::abs(dot(d, r.width_axis())) <= 0.5 * r.w &&
         std::abs(dot(d, r.height_axis())) <= 0.5 * r.h;
}

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(),
            [](Point a, Point b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point> hull(2 * pts.size());
  size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

RotatedRect min_area_rect(std::span<const Point> points, Point preferred_axis) {
  const auto hull = convex_hull(points);
  if (hull.size() < 3) throw InvalidGeometry("min_area_rect needs a non-degenerate point set");

  const double pref_norm = std::hypot(preferred_axis.x, preferred_axis.y);
  const Point pref = pref_norm > 0.0 ? (1.0 / pref_norm) * preferred_axis : Point{1.0, 0.0};

  struct Fit {
    Point e, n;
    double emin, emax, nmin, nmax, area, alignment;
  };
  Fit best{};
  best.area = std::numeric_limits<double>::infinity();

  for (size_t i = 0; i < hull.size(); ++i) {
    Point e = hull[(i + 1) % hull.size()] - hull[i];
    const double len = std::hypot(e.x, e.y);
    if (len <= 0.0) continue;
    e = (1.0 / len) * e;
    const Point n{-e.y, e.x};
    Fit f{e, n, 0, 0, 0, 0, 0, 0};
    f.emin = f.nmin = std::numeric_limits<double>::infinity();
    f.emax = f.nmax = -std::numeric_limits<double>::infinity();
    for (const Point& p : hull) {
      const double pe = dot(p, e);
      const double pn = dot(p, n);
      f.emin = std::min(f.emin, pe);
      f.emax = std::max(f.emax, pe);
      f.nmin = std::min(f.nmin, pn);
      f.nmax = std::max(f.nmax, pn);
    }
    f.area = (f.emax - f.emin) * (f.nmax - f.nmin);
    f.alignment = std::max(std::abs(dot(e, pref)), std::abs(dot(n, pref)));
    const double tol = 1e-12 * std::max(f.area, best.area == std::numeric_limits<double>::infinity()
                                                    ? f.area
                                                    : best.area);
    if (f.area < best.area - tol ||
        (std::abs(f.area - best.area) <= tol && f.alignment > best.alignment)) {
      best = f;
    }
  }

  const double ce = 0.5 * (best.emin + best.emax);
  const double cn = 0.5 * (best.nmin + best.nmax);
  const Point center = ce * best.e + cn * best.n;
  const bool width_along_n = std::abs(dot(best.n, pref)) > std::abs(dot(best.e, pref));
  const Point axis = width_along_n ? best.n : best.e;
  const double width = width_along_n ? best.nmax - best.nmin : best.emax - best.emin;
  const double height = width_along_n ? best.emax - best.emin : best.nmax - best.nmin;
  return RotatedRect(center.x, center.y, width, height, std::atan2(axis.y, axis.x));
}

}  // namespace seglink
