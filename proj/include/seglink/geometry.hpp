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
#include <span>
#include <vector>

namespace seglink {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

/// Maps an angle in radians onto (-pi/2, pi/2]. A rectangle and its
/// half-turn are the same shape, so orientation is taken modulo pi.
double normalize_angle(double theta);

/// Oriented rectangle. `w` runs along (cos theta, sin theta), `h` along
/// (-sin theta, cos theta), in image coordinates (+y down).
///
/// The constructor enforces w > 0, h > 0, finite fields, and normalizes
/// theta; it throws InvalidGeometry otherwise. Fields stay public so the
/// numeric code can read them directly; writers must keep the invariants.
struct RotatedRect {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;
  double theta = 0.0;

  RotatedRect() = default;
  RotatedRect(double cx, double cy, double width, double height, double angle);

  Point center() const { return {x, y}; }
  Point width_axis() const;
  Point height_axis() const;
  double area() const { return w * h; }

  friend bool operator==(const RotatedRect&, const RotatedRect&) = default;
};

/// Convex quadrilateral, vertices counter-clockwise in the shoelace sense
/// (positive signed area).
struct Quad {
  std::array<Point, 4> vertices;
};

struct AlignedBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

Quad to_quad(const RotatedRect& r);

/// Shoelace signed area; positive for the vertex order used by Quad.
double signed_area(std::span<const Point> polygon);

/// Clips `subject` against the convex polygon `clip` (Sutherland-Hodgman).
/// Both polygons must have positive orientation.
std::vector<Point> clip_convex(std::span<const Point> subject,
                               std::span<const Point> clip);

double intersection_area(const RotatedRect& a, const RotatedRect& b);

/// Intersection over union of two oriented rectangles. Exactly symmetric:
/// the pair is put in a canonical order before clipping.
double rotated_iou(const RotatedRect& a, const RotatedRect& b);

RotatedRect rotate_about(const RotatedRect& r, Point pivot, double angle);
Point rotate_point(Point p, Point pivot, double angle);

AlignedBox axis_aligned_bbox(const RotatedRect& r);

double jaccard(const AlignedBox& a, const AlignedBox& b);

/// Inclusive point-in-rectangle test against the oriented rectangle.
bool contains(const RotatedRect& r, Point p);

/// Minimum-area enclosing rectangle of a point set (rotating calipers over
/// the convex hull). Among equal-area fits and for the choice of which side
/// is the width, the axis closest to `preferred_axis` wins.
RotatedRect min_area_rect(std::span<const Point> points, Point preferred_axis);

std::vector<Point> convex_hull(std::span<const Point> points);

}  // namespace seglink
