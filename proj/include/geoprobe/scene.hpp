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
// Scene model: an ordered list of styled vector primitives on a fixed-size
// canvas. Element order defines paint order.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "geoprobe/font.hpp"
#include "geoprobe/geometry.hpp"

namespace geoprobe {

struct Color {
  uint8_t r = 0, g = 0, b = 0;

  friend bool operator==(Color a, Color b) {
    return a.r == b.r && a.g == b.g && a.b == b.b;
  }

  // Rec. 709 luma, 0..255.
  double luminance() const { return 0.2126 * r + 0.7152 * g + 0.0722 * b; }

  std::string hex() const {
    static const char* d = "0123456789abcdef";
    std::string s = "#......";
    s[1] = d[r >> 4]; s[2] = d[r & 0xf];
    s[3] = d[g >> 4]; s[4] = d[g & 0xf];
    s[5] = d[b >> 4]; s[6] = d[b & 0xf];
    return s;
  }

  static Color from_hex(const std::string& s) {
    auto nib = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw std::invalid_argument("Color::from_hex: bad digit");
    };
    if (s.size() != 7 || s[0] != '#')
      throw std::invalid_argument("Color::from_hex: expected #rrggbb");
    return Color{static_cast<uint8_t>(nib(s[1]) * 16 + nib(s[2])),
                 static_cast<uint8_t>(nib(s[3]) * 16 + nib(s[4])),
                 static_cast<uint8_t>(nib(s[5]) * 16 + nib(s[6]))};
  }
};

struct Style {
  Color stroke{0, 0, 0};
  double stroke_width = 1.0;
  std::optional<Color> fill;
};

// Free-form point path; unlike geometry Polyline this carries no
// function-graph constraint (subway paths bend in every direction).
struct ScenePolyline {
  std::vector<Point> points;
};

struct SceneCircle {
  Point center;
  double radius = 1;
};

struct SceneSquare {
  Point center;
  double half_size = 1;
  double rotation = 0;
};

struct GlyphRun {
  std::string text;
  Point origin;  // top-left corner of the first glyph cell
  double font_size = 16;
};

struct AnnotationEllipse {
  Point center;
  double rx = 1;
  double ry = 1;
};

struct SceneElement {
  std::variant<ScenePolyline, SceneCircle, SceneSquare, GlyphRun,
               AnnotationEllipse>
      shape;
  Style style;
};

struct Scene {
  int width = 512;
  int height = 512;
  Color background{255, 255, 255};
  std::vector<SceneElement> elements;
};

struct Bounds {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  void expand(Point p) {
    x0 = std::min(x0, p.x); y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x); y1 = std::max(y1, p.y);
  }
  static Bounds at(Point p) { return {p.x, p.y, p.x, p.y}; }
};

inline Bounds element_bounds(const SceneElement& e) {
  struct Visitor {
    Bounds operator()(const ScenePolyline& p) const {
      Bounds b = Bounds::at(p.points.at(0));
      for (Point pt : p.points) b.expand(pt);
      return b;
    }
    Bounds operator()(const SceneCircle& c) const {
      return {c.center.x - c.radius, c.center.y - c.radius,
              c.center.x + c.radius, c.center.y + c.radius};
    }
    Bounds operator()(const SceneSquare& s) const {
      Square sq(s.center, s.half_size, s.rotation);
      Bounds b = Bounds::at(sq.corners()[0]);
      for (Point c : sq.corners()) b.expand(c);
      return b;
    }
    Bounds operator()(const GlyphRun& g) const {
      Rect first = glyph_box(g.text, 0, g.origin, g.font_size);
      Rect last = glyph_box(g.text, g.text.size() - 1, g.origin, g.font_size);
      return {first.x, first.y, last.x + last.w, last.y + last.h};
    }
    Bounds operator()(const AnnotationEllipse& e) const {
      return {e.center.x - e.rx, e.center.y - e.ry,
              e.center.x + e.rx, e.center.y + e.ry};
    }
  };
  return std::visit(Visitor{}, e.shape);
}

// Canvas size in [256, 2048]; every element stays within the canvas
// inflated by its stroke width; styles are sane.
inline void validate_scene(const Scene& scene) {
  if (scene.width < 256 || scene.width > 2048 || scene.height < 256 ||
      scene.height > 2048)
    throw std::invalid_argument("Scene: canvas size must lie in [256, 2048]");
  for (const SceneElement& e : scene.elements) {
    if (!(e.style.stroke_width > 0))
      throw std::invalid_argument("Scene: stroke_width must be positive");
    if (auto* g = std::get_if<GlyphRun>(&e.shape)) {
      if (g->text.empty())
        throw std::invalid_argument("Scene: empty glyph run");
    }
    if (auto* p = std::get_if<ScenePolyline>(&e.shape)) {
      if (p->points.size() < 2)
        throw std::invalid_argument("Scene: polyline needs >= 2 points");
    }
    Bounds b = element_bounds(e);
    double inflate = e.style.stroke_width;
    if (b.x0 < -inflate || b.y0 < -inflate ||
        b.x1 > scene.width + inflate || b.y1 > scene.height + inflate)
      throw std::invalid_argument("Scene: element exceeds canvas bounds");
  }
}

}  // namespace geoprobe
