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
// Embedded fixed-advance 5x7 bitmap font. Glyph geometry must be computable
// from (origin, font_size, character index) alone, on every machine, so the
// circled-letter task can be scored exactly; hence no system font is ever
// loaded. The bitmap table is pinned by checksum in the test suite.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "geoprobe/geometry.hpp"
#include "geoprobe/sha256.hpp"

namespace geoprobe {

// Horizontal advance per glyph, as a fraction of font size.
inline constexpr double kGlyphAdvanceRatio = 0.6;
// Glyph cell height (line height), as a fraction of font size.
inline constexpr double kGlyphLineHeightRatio = 1.0;
// Ink region inside the cell: 5 columns x 7 rows of dots, centered both
// ways. Keeping the ink well inside the cell guarantees that an ellipse
// sized 1.3x the cell always contains it.
inline constexpr double kGlyphInkColWidthRatio = 0.096;  // 5 cols = 0.48
inline constexpr double kGlyphInkRowHeightRatio = 0.08;  // 7 rows = 0.56
inline constexpr double kGlyphInkLeftRatio = 0.06;       // (0.6 - 0.48) / 2
inline constexpr double kGlyphInkTopRatio = 0.22;        // (1.0 - 0.56) / 2
// Baseline used when a glyph run is written out as SVG text: the bottom of
// the ink region.
inline constexpr double kGlyphBaselineRatio = 0.78;

struct Rect {
  double x = 0, y = 0, w = 0, h = 0;

  Point center() const { return {x + w / 2, y + h / 2}; }
  bool contains(Point p) const {
    return p.x >= x && p.x <= x + w && p.y >= y && p.y <= y + h;
  }
};

using GlyphBitmap = std::array<uint8_t, 7>;  // low 5 bits per row, 0x10 = left

namespace detail {

// a-z then A-Z; anything else renders blank.
inline constexpr std::array<GlyphBitmap, 52> kGlyphTable = {{
    {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F},  // a
    {0x10, 0x10, 0x1E, 0x11, 0x11, 0x11, 0x1E},  // b
    {0x00, 0x00, 0x0E, 0x10, 0x10, 0x11, 0x0E},  // c
    {0x01, 0x01, 0x0F, 0x11, 0x11, 0x11, 0x0F},  // d
    {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E},  // e
    {0x06, 0x09, 0x08, 0x1C, 0x08, 0x08, 0x08},  // f
    {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E},  // g
    {0x10, 0x10, 0x1E, 0x11, 0x11, 0x11, 0x11},  // h
    {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E},  // i
    {0x02, 0x00, 0x06, 0x02, 0x02, 0x12, 0x0C},  // j
    {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12},  // k
    {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E},  // l
    {0x00, 0x00, 0x1A, 0x15, 0x15, 0x15, 0x15},  // m
    {0x00, 0x00, 0x1E, 0x11, 0x11, 0x11, 0x11},  // n
    {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E},  // o
    {0x00, 0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10},  // p
    {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x01},  // q
    {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10},  // r
    {0x00, 0x00, 0x0F, 0x10, 0x0E, 0x01, 0x1E},  // s
    {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06},  // t
    {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D},  // u
    {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04},  // v
    {0x00, 0x00, 0x11, 0x11, 0x15, 0x15, 0x0A},  // w
    {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11},  // x
    {0x00, 0x00, 0x11, 0x11, 0x0F, 0x01, 0x0E},  // y
    {0x00, 0x00, 0x1F, 0x02, 0x04, 0x08, 0x1F},  // z
    {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // A
    {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},  // B
    {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E},  // C
    {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E},  // D
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F},  // E
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},  // F
    {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F},  // G
    {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // H
    {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E},  // I
    {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},  // J
    {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},  // K
    {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},  // L
    {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11},  // M
    {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11},  // N
    {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // O
    {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},  // P
    {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D},  // Q
    {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},  // R
    {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E},  // S
    {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},  // T
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // U
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},  // V
    {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A},  // W
    {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},  // X
    {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04},  // Y
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},  // Z
}};

inline constexpr GlyphBitmap kBlankGlyph = {0, 0, 0, 0, 0, 0, 0};

}  // namespace detail

inline const GlyphBitmap& glyph_bitmap(char c) {
  if (c >= 'a' && c <= 'z') return detail::kGlyphTable[c - 'a'];
  if (c >= 'A' && c <= 'Z') return detail::kGlyphTable[26 + (c - 'A')];
  return detail::kBlankGlyph;
}

inline double glyph_advance(double font_size) {
  return kGlyphAdvanceRatio * font_size;
}

inline double glyph_line_height(double font_size) {
  return kGlyphLineHeightRatio * font_size;
}

// Bounding rectangle of the index-th glyph cell under the fixed-advance
// metric.
inline Rect glyph_box(const std::string& text, size_t index, Point origin,
                      double font_size) {
  if (index >= text.size())
    throw std::out_of_range("glyph_box: index out of range");
  return Rect{origin.x + static_cast<double>(index) * glyph_advance(font_size),
              origin.y, glyph_advance(font_size),
              glyph_line_height(font_size)};
}

// The 5x7 ink region inside a glyph cell.
inline Rect glyph_ink_box(const std::string& text, size_t index, Point origin,
                          double font_size) {
  Rect cell = glyph_box(text, index, origin, font_size);
  return Rect{cell.x + kGlyphInkLeftRatio * font_size,
              cell.y + kGlyphInkTopRatio * font_size,
              5 * kGlyphInkColWidthRatio * font_size,
              7 * kGlyphInkRowHeightRatio * font_size};
}

// Checksum over the raw bitmap table; recorded in dataset metadata and
// pinned by a unit test so a silent font change cannot go unnoticed.
inline std::string font_checksum() {
  std::string bytes;
  for (const GlyphBitmap& g : detail::kGlyphTable)
    for (uint8_t row : g) bytes.push_back(static_cast<char>(row));
  return sha256_hex(bytes);
}

}  // namespace geoprobe
