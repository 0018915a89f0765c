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
// Software rasterizer: Scene -> 8-bit RGB image -> PNG bytes. Coverage is
// estimated with a 4x4 subsample grid per pixel. Within one paint pass the
// per-pixel coverage of overlapping pieces (e.g. polyline joints) is
// max-combined before blending, so seams never double-blend.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "geoprobe/png.hpp"
#include "geoprobe/scene.hpp"

namespace geoprobe {

namespace detail {

inline constexpr int kAaGrid = 4;  // 4x4 subsamples per pixel

inline double point_segment_dist_sq(Point p, Point a, Point b) {
  Point d = b - a;
  double dd = dot(d, d);
  double t = dd > 0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
  Point q = a + t * d;
  Point e = p - q;
  return dot(e, e);
}

class Rasterizer {
 public:
  explicit Rasterizer(const Scene& scene) : scene_(scene) {
    validate_scene(scene);
    img_.width = scene.width;
    img_.height = scene.height;
    img_.rgb.assign(static_cast<size_t>(scene.width) * scene.height * 3, 0);
    for (size_t i = 0; i < img_.rgb.size(); i += 3) {
      img_.rgb[i] = scene.background.r;
      img_.rgb[i + 1] = scene.background.g;
      img_.rgb[i + 2] = scene.background.b;
    }
    cov_.assign(static_cast<size_t>(scene.width) * scene.height, 0.f);
  }

  Image render() {
    for (const SceneElement& e : scene_.elements) render_element(e);
    return std::move(img_);
  }

 private:
  struct PixelRect {
    int x0, y0, x1, y1;  // half-open
    bool empty() const { return x0 >= x1 || y0 >= y1; }
    void merge(const PixelRect& o) {
      x0 = std::min(x0, o.x0); y0 = std::min(y0, o.y0);
      x1 = std::max(x1, o.x1); y1 = std::max(y1, o.y1);
    }
  };

  PixelRect clip(Bounds b) const {
    return {std::max(0, static_cast<int>(std::floor(b.x0 - 1))),
            std::max(0, static_cast<int>(std::floor(b.y0 - 1))),
            std::min(img_.width, static_cast<int>(std::ceil(b.x1 + 2))),
            std::min(img_.height, static_cast<int>(std::ceil(b.y1 + 2)))};
  }

  // Max-accumulates the coverage of one primitive over its pixel rect.
  template <typename InsideFn>
  PixelRect cover(Bounds b, InsideFn&& inside) {
    PixelRect r = clip(b);
    constexpr double step = 1.0 / kAaGrid;
    for (int py = r.y0; py < r.y1; ++py) {
      for (int px = r.x0; px < r.x1; ++px) {
        int hits = 0;
        for (int sy = 0; sy < kAaGrid; ++sy) {
          double yy = py + (sy + 0.5) * step;
          for (int sx = 0; sx < kAaGrid; ++sx) {
            if (inside(Point{px + (sx + 0.5) * step, yy})) ++hits;
          }
        }
        if (hits > 0) {
          float c = static_cast<float>(hits) / (kAaGrid * kAaGrid);
          float& slot = cov_[static_cast<size_t>(py) * img_.width + px];
          if (c > slot) slot = c;
        }
      }
    }
    return r;
  }

  // Blends the accumulated coverage with `color`, then clears it.
  void composite(Color color, PixelRect r) {
    if (r.empty()) return;
    for (int py = r.y0; py < r.y1; ++py) {
      for (int px = r.x0; px < r.x1; ++px) {
        float& c = cov_[static_cast<size_t>(py) * img_.width + px];
        if (c > 0.f) {
          uint8_t* p = img_.pixel(px, py);
          p[0] = static_cast<uint8_t>(std::lround(p[0] * (1 - c) + color.r * c));
          p[1] = static_cast<uint8_t>(std::lround(p[1] * (1 - c) + color.g * c));
          p[2] = static_cast<uint8_t>(std::lround(p[2] * (1 - c) + color.b * c));
          c = 0.f;
        }
      }
    }
  }

  void render_element(const SceneElement& e) {
    const Style& st = e.style;
    const double hw = st.stroke_width / 2;

    if (const auto* p = std::get_if<ScenePolyline>(&e.shape)) {
      PixelRect all{img_.width, img_.height, 0, 0};
      for (size_t i = 0; i + 1 < p->points.size(); ++i) {
        Point a = p->points[i], b = p->points[i + 1];
        Bounds bb{std::min(a.x, b.x) - hw, std::min(a.y, b.y) - hw,
                  std::max(a.x, b.x) + hw, std::max(a.y, b.y) + hw};
        all.merge(cover(bb, [a, b, hw](Point q) {
          return point_segment_dist_sq(q, a, b) <= hw * hw;
        }));
      }
      composite(st.stroke, all);
    } else if (const auto* c = std::get_if<SceneCircle>(&e.shape)) {
      Bounds bb{c->center.x - c->radius - hw, c->center.y - c->radius - hw,
                c->center.x + c->radius + hw, c->center.y + c->radius + hw};
      if (st.fill) {
        Point ctr = c->center;
        double r = c->radius;
        composite(*st.fill, cover(bb, [ctr, r](Point q) {
          Point d = q - ctr;
          return dot(d, d) <= r * r;
        }));
      }
      Point ctr = c->center;
      double r = c->radius;
      composite(st.stroke, cover(bb, [ctr, r, hw](Point q) {
        double d = norm(q - ctr);
        return std::abs(d - r) <= hw;
      }));
    } else if (const auto* s = std::get_if<SceneSquare>(&e.shape)) {
      Square sq(s->center, s->half_size, s->rotation);
      Bounds bb = element_bounds(e);
      bb.x0 -= hw; bb.y0 -= hw; bb.x1 += hw; bb.y1 += hw;
      double cosr = std::cos(s->rotation), sinr = std::sin(s->rotation);
      Point ctr = s->center;
      double hs = s->half_size;
      auto box_sdf = [cosr, sinr, ctr, hs](Point q) {
        Point d = q - ctr;
        double lx = std::abs(cosr * d.x + sinr * d.y) - hs;
        double ly = std::abs(-sinr * d.x + cosr * d.y) - hs;
        double ox = std::max(lx, 0.0), oy = std::max(ly, 0.0);
        return std::hypot(ox, oy) + std::min(std::max(lx, ly), 0.0);
      };
      if (st.fill) {
        composite(*st.fill,
                  cover(bb, [box_sdf](Point q) { return box_sdf(q) <= 0; }));
      }
      composite(st.stroke, cover(bb, [box_sdf, hw](Point q) {
        return std::abs(box_sdf(q)) <= hw;
      }));
    } else if (const auto* g = std::get_if<GlyphRun>(&e.shape)) {
      const double colw = kGlyphInkColWidthRatio * g->font_size;
      const double rowh = kGlyphInkRowHeightRatio * g->font_size;
      PixelRect all{img_.width, img_.height, 0, 0};
      for (size_t i = 0; i < g->text.size(); ++i) {
        const GlyphBitmap& bm = glyph_bitmap(g->text[i]);
        double gx = g->origin.x + i * glyph_advance(g->font_size) +
                    kGlyphInkLeftRatio * g->font_size;
        double gy = g->origin.y + kGlyphInkTopRatio * g->font_size;
        for (int row = 0; row < 7; ++row) {
          for (int col = 0; col < 5; ++col) {
            if (!(bm[row] & (0x10 >> col))) continue;
            double x0 = gx + col * colw, y0 = gy + row * rowh;
            double x1 = x0 + colw, y1 = y0 + rowh;
            all.merge(cover(Bounds{x0, y0, x1, y1}, [x0, y0, x1, y1](Point q) {
              return q.x >= x0 && q.x < x1 && q.y >= y0 && q.y < y1;
            }));
          }
        }
      }
      composite(st.stroke, all);
    } else if (const auto* el = std::get_if<AnnotationEllipse>(&e.shape)) {
      // Stroke the boundary via a dense polygonal approximation; candidate
      // segments are found from the angular parameter, so each subsample
      // checks only a small window.
      constexpr int kArcSegments = 192;
      std::vector<Point> pts(kArcSegments + 1);
      for (int i = 0; i <= kArcSegments; ++i) {
        double t = 2 * std::numbers::pi * i / kArcSegments;
        pts[i] = {el->center.x + el->rx * std::cos(t),
                  el->center.y + el->ry * std::sin(t)};
      }
      Bounds bb{el->center.x - el->rx - hw, el->center.y - el->ry - hw,
                el->center.x + el->rx + hw, el->center.y + el->ry + hw};
      Point ctr = el->center;
      double rx = el->rx, ry = el->ry;
      composite(st.stroke, cover(bb, [&pts, ctr, rx, ry, hw](Point q) {
        double t = std::atan2((q.y - ctr.y) / ry, (q.x - ctr.x) / rx);
        int i0 = static_cast<int>(
            std::lround(t / (2 * std::numbers::pi) * kArcSegments));
        for (int di = -8; di <= 8; ++di) {
          int i = ((i0 + di) % kArcSegments + kArcSegments) % kArcSegments;
          if (point_segment_dist_sq(q, pts[i], pts[i + 1]) <= hw * hw)
            return true;
        }
        return false;
      }));
    }
  }

  const Scene& scene_;
  Image img_;
  std::vector<float> cov_;
};

}  // namespace detail

inline Image rasterize_image(const Scene& scene) {
  return detail::Rasterizer(scene).render();
}

// Scene -> PNG bytes (exactly scene.width x scene.height, 8-bit RGB).
inline std::vector<uint8_t> rasterize(const Scene& scene) {
  return encode_png(rasterize_image(scene));
}

}  // namespace geoprobe
