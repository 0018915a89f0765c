// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0
//
// Exact-enough geometric predicates and counting oracles. All ground truth
// for the generated tasks is computed here. Everything is plain double
// precision; generators enforce layout margins that keep every decision far
// from the numeric noise floor.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace geoprobe {

// Distinct intersection points closer than this are merged when counting.
inline constexpr double kIntersectionDedupTol = 1e-9;

struct Point {
  double x = 0;
  double y = 0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

inline bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline void require_finite(Point p, const char* what) {
  if (!finite(p)) throw std::invalid_argument(std::string(what) + ": non-finite point");
}

class Segment {
 public:
  Segment(Point a, Point b) : a_(a), b_(b) {
    require_finite(a, "Segment");
    require_finite(b, "Segment");
    if (a == b) throw std::invalid_argument("Segment: endpoints must differ");
  }

  Point a() const { return a_; }
  Point b() const { return b_; }
  double length() const { return distance(a_, b_); }

 private:
  Point a_, b_;
};

// Piecewise-linear function graph: x-coordinates strictly increasing.
class Polyline {
 public:
  explicit Polyline(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.size() < 2)
      throw std::invalid_argument("Polyline: needs at least 2 points");
    for (size_t i = 0; i < points_.size(); ++i) {
      require_finite(points_[i], "Polyline");
      if (i > 0 && !(points_[i].x > points_[i - 1].x))
        throw std::invalid_argument("Polyline: x must be strictly increasing");
    }
  }

  const std::vector<Point>& points() const { return points_; }
  size_t segment_count() const { return points_.size() - 1; }
  Segment segment(size_t i) const { return Segment(points_[i], points_[i + 1]); }

 private:
  std::vector<Point> points_;
};

class Circle {
 public:
  Circle(Point center, double radius) : center_(center), radius_(radius) {
    require_finite(center, "Circle");
    if (!(radius > 0) || !std::isfinite(radius))
      throw std::invalid_argument("Circle: radius must be positive");
  }

  Point center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Point center_;
  double radius_;
};

class Square {
 public:
  Square(Point center, double half_size, double rotation)
      : center_(center), half_size_(half_size), rotation_(rotation) {
    require_finite(center, "Square");
    if (!(half_size > 0) || !std::isfinite(half_size))
      throw std::invalid_argument("Square: half_size must be positive");
    if (!(rotation >= 0) || !(rotation < std::numbers::pi / 2))
      throw std::invalid_argument("Square: rotation must lie in [0, pi/2)");
  }

  Point center() const { return center_; }
  double half_size() const { return half_size_; }
  double rotation() const { return rotation_; }

  std::vector<Point> corners() const {
    double c = std::cos(rotation_), s = std::sin(rotation_);
    std::vector<Point> out;
    for (auto [dx, dy] : {std::pair{-half_size_, -half_size_},
                          std::pair{half_size_, -half_size_},
                          std::pair{half_size_, half_size_},
                          std::pair{-half_size_, half_size_}}) {
      out.push_back({center_.x + c * dx - s * dy, center_.y + s * dx + c * dy});
    }
    return out;
  }

  // L-infinity distance of p from the center, measured in the square's own
  // frame. p is inside iff this is <= half_size.
  double frame_linf(Point p) const {
    double c = std::cos(rotation_), s = std::sin(rotation_);
    Point d = p - center_;
    double lx = c * d.x + s * d.y;
    double ly = -s * d.x + c * d.y;
    return std::max(std::abs(lx), std::abs(ly));
  }

 private:
  Point center_;
  double half_size_;
  double rotation_;
};

// --- Segment intersection -------------------------------------------------

// Unique intersection point of two segments (crossing or one-point touch).
// Collinear overlap of positive length returns nullopt; generators are
// required to avoid producing it (see segments_collinear_overlap).
inline std::optional<Point> segment_intersection(const Segment& s1,
                                                 const Segment& s2) {
  Point p = s1.a(), r = s1.b() - s1.a();
  Point q = s2.a(), s = s2.b() - s2.a();
  double denom = cross(r, s);
  Point qp = q - p;
  if (denom == 0) {
    if (cross(qp, r) != 0) return std::nullopt;  // parallel, distinct lines
    // Collinear: intersect segments as 1D intervals along r.
    double rr = dot(r, r);
    double t0 = dot(qp, r) / rr;
    double t1 = t0 + dot(s, r) / rr;
    double lo = std::max(std::min(t0, t1), 0.0);
    double hi = std::min(std::max(t0, t1), 1.0);
    if (lo > hi) return std::nullopt;
    if (lo == hi) return p + lo * r;  // single-point touch
    return std::nullopt;              // positive-length overlap
  }
  double t = cross(qp, s) / denom;
  double u = cross(qp, r) / denom;
  if (t < 0 || t > 1 || u < 0 || u > 1) return std::nullopt;
  return p + t * r;
}

// True when the segments are collinear and overlap on more than one point.
inline bool segments_collinear_overlap(const Segment& s1, const Segment& s2) {
  Point r = s1.b() - s1.a(), s = s2.b() - s2.a();
  if (cross(r, s) != 0) return false;                // not parallel
  if (cross(s2.a() - s1.a(), r) != 0) return false;  // parallel, distinct lines
  double rr = dot(r, r);
  double t0 = dot(s2.a() - s1.a(), r) / rr;
  double t1 = t0 + dot(s, r) / rr;
  double lo = std::max(std::min(t0, t1), 0.0);
  double hi = std::min(std::max(t0, t1), 1.0);
  return lo < hi;
}

inline double point_segment_distance(Point p, const Segment& s) {
  Point d = s.b() - s.a();
  double t = dot(p - s.a(), d) / dot(d, d);
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, s.a() + t * d);
}

inline double segment_segment_distance(const Segment& s1, const Segment& s2) {
  if (segment_intersection(s1, s2) || segments_collinear_overlap(s1, s2))
    return 0.0;
  return std::min(std::min(point_segment_distance(s1.a(), s2),
                           point_segment_distance(s1.b(), s2)),
                  std::min(point_segment_distance(s2.a(), s1),
                           point_segment_distance(s2.b(), s1)));
}

// Number of distinct intersection points of two function-graph polylines.
// A point shared by adjacent segment pairs is counted once.
inline int count_polyline_intersections(const Polyline& p1,
                                        const Polyline& p2) {
  std::vector<Point> hits;
  for (size_t i = 0; i < p1.segment_count(); ++i) {
    for (size_t j = 0; j < p2.segment_count(); ++j) {
      if (auto pt = segment_intersection(p1.segment(i), p2.segment(j))) {
        bool dup = false;
        for (const Point& h : hits) {
          if (distance(h, *pt) <= kIntersectionDedupTol) {
            dup = true;
            break;
          }
        }
        if (!dup) hits.push_back(*pt);
      }
    }
  }
  return static_cast<int>(hits.size());
}

// --- Circles ----------------------------------------------------------------

// Closed-interval intersection test: tangency counts as intersecting, one
// circle strictly inside the other does not. Squared comparisons keep the
// boundary decisions exact whenever the inputs are exactly representable.
inline bool circles_intersect(const Circle& c1, const Circle& c2) {
  Point d = c2.center() - c1.center();
  double d2 = dot(d, d);
  double sum = c1.radius() + c2.radius();
  double diff = c1.radius() - c2.radius();
  return d2 <= sum * sum && d2 >= diff * diff;
}

// Unordered circle pairs that intersect. The ring generator uses this to
// enforce the interlocking layout; the task answer stays the ring count.
inline int ring_overlap_count(const std::vector<Circle>& circles) {
  if (circles.empty())
    throw std::invalid_argument("ring_overlap_count: empty list");
  int pairs = 0;
  for (size_t i = 0; i < circles.size(); ++i)
    for (size_t j = i + 1; j < circles.size(); ++j)
      if (circles_intersect(circles[i], circles[j])) ++pairs;
  return pairs;
}

// --- Nested squares ---------------------------------------------------------

// True iff, sorted by half_size descending, each square's four corners lie
// strictly inside the previous square with margin >= clearance.
inline bool squares_strictly_nested(const std::vector<Square>& squares,
                                    double clearance) {
  if (squares.size() < 2)
    throw std::invalid_argument("squares_strictly_nested: need >= 2 squares");
  std::vector<const Square*> order;
  for (const Square& s : squares) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const Square* a, const Square* b) {
    return a->half_size() > b->half_size();
  });
  for (size_t i = 1; i < order.size(); ++i) {
    const Square& outer = *order[i - 1];
    const Square& inner = *order[i];
    for (Point corner : inner.corners()) {
      if (outer.frame_linf(corner) > outer.half_size() - clearance)
        return false;
    }
  }
  return true;
}

// --- Station graph ----------------------------------------------------------

struct GridNode {
  int row = 0;
  int col = 0;

  friend bool operator==(GridNode a, GridNode b) {
    return a.row == b.row && a.col == b.col;
  }
  friend auto operator<=>(GridNode a, GridNode b) = default;
};

// Labeled grid of stations with colored rectilinear paths drawn on the unit
// edges. The query names two terminal labels; the task answer is how many
// drawn paths connect them.
struct StationGraph {
  int rows = 0;
  int cols = 0;

  struct PathLine {
    std::string color;
    std::vector<GridNode> nodes;
  };

  std::vector<PathLine> paths;
  std::map<char, GridNode> terminals;
  std::pair<char, char> query{'A', 'B'};

  void validate() const {
    if (rows < 2 || cols < 2)
      throw std::invalid_argument("StationGraph: grid too small");
    std::vector<std::string> colors;
    for (const PathLine& p : paths) {
      if (p.nodes.size() < 2)
        throw std::invalid_argument("StationGraph: path too short");
      for (size_t i = 0; i < p.nodes.size(); ++i) {
        const GridNode& n = p.nodes[i];
        if (n.row < 0 || n.row >= rows || n.col < 0 || n.col >= cols)
          throw std::invalid_argument("StationGraph: node out of grid");
        if (i > 0) {
          int dr = std::abs(n.row - p.nodes[i - 1].row);
          int dc = std::abs(n.col - p.nodes[i - 1].col);
          if (dr + dc != 1)
            throw std::invalid_argument(
                "StationGraph: consecutive nodes must share a unit edge");
        }
      }
      if (std::find(colors.begin(), colors.end(), p.color) != colors.end())
        throw std::invalid_argument("StationGraph: duplicate path color");
      colors.push_back(p.color);
    }
    if (!terminals.count(query.first) || !terminals.count(query.second))
      throw std::invalid_argument("StationGraph: query terminal not labeled");
  }
};

// Number of drawn paths whose endpoints equal the query terminals,
// order-insensitive.
inline int count_terminal_paths(const StationGraph& g) {
  g.validate();
  GridNode t1 = g.terminals.at(g.query.first);
  GridNode t2 = g.terminals.at(g.query.second);
  int count = 0;
  for (const auto& p : g.paths) {
    GridNode a = p.nodes.front();
    GridNode b = p.nodes.back();
    if ((a == t1 && b == t2) || (a == t2 && b == t1)) ++count;
  }
  return count;
}

}  // namespace geoprobe
