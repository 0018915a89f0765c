// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#include "geoprobe/raster.hpp"

#include <gtest/gtest.h>

#include "geoprobe/rng.hpp"
#include "geoprobe/svg.hpp"

namespace geoprobe {
namespace {

Scene white_scene() {
  Scene s;
  s.width = 512;
  s.height = 512;
  s.background = {255, 255, 255};
  return s;
}

TEST(GlyphBox, FixedAdvanceMetric) {
  // advance = 0.6 * font_size = 19.2 at 32px.
  Rect r = glyph_box("cat", 0, {100, 100}, 32);
  EXPECT_DOUBLE_EQ(r.x, 100);
  EXPECT_DOUBLE_EQ(r.y, 100);
  EXPECT_NEAR(r.w, 19.2, 1e-12);
  EXPECT_NEAR(r.h, 32.0, 1e-12);

  Rect mid = glyph_box("cat", 1, {100, 100}, 32);
  EXPECT_NEAR(mid.x, 100 + 19.2, 1e-12);

  // Last glyph's right edge sits at origin.x + len * advance.
  Rect last = glyph_box("cat", 2, {100, 100}, 32);
  EXPECT_NEAR(last.x + last.w, 100 + 3 * 19.2, 1e-9);
}

TEST(GlyphBox, IndexOutOfRange) {
  EXPECT_THROW(glyph_box("cat", 3, {0, 0}, 32), std::out_of_range);
}

TEST(Font, ChecksumIsPinned) {
  // Computed once from the shipped bitmap table (cross-checked with an
  // external sha256 tool); any font change must be deliberate and
  // re-pinned here.
  EXPECT_EQ(font_checksum(),
            "8ca8825f4347c3aef0c3c982cbee0aaa97c35078d48483c19006d16aec750944");
}

TEST(Rasterize, EmptyWhiteSceneIsAllWhite) {
  Image img = rasterize_image(white_scene());
  ASSERT_EQ(img.width, 512);
  ASSERT_EQ(img.height, 512);
  for (int y = 0; y < img.height; y += 7) {
    for (int x = 0; x < img.width; x += 7) {
      const uint8_t* p = img.pixel(x, y);
      ASSERT_EQ(p[0], 255);
      ASSERT_EQ(p[1], 255);
      ASSERT_EQ(p[2], 255);
    }
  }
}

TEST(Rasterize, HorizontalSegmentProbes) {
  Scene s = white_scene();
  s.elements.push_back({ScenePolyline{{{0, 256}, {511, 256}}},
                        Style{{0, 0, 0}, 4.0, std::nullopt}});
  std::vector<uint8_t> png = rasterize(s);
  Image img = decode_png(png);
  ASSERT_EQ(img.width, 512);
  ASSERT_EQ(img.height, 512);
  EXPECT_LT(img.luminance(256, 256), 128.0);
  EXPECT_GT(img.luminance(256, 100), 254.5);
}

TEST(Rasterize, GlyphInkInsideComputedBox) {
  Scene s = white_scene();
  GlyphRun run{"A", {200, 200}, 64};
  s.elements.push_back({run, Style{{0, 0, 0}, 1.0, std::nullopt}});
  Image img = rasterize_image(s);
  Rect box = glyph_box(run.text, 0, run.origin, run.font_size);
  int ink = 0;
  for (int y = static_cast<int>(box.y); y < box.y + box.h; ++y)
    for (int x = static_cast<int>(box.x); x < box.x + box.w; ++x)
      if (img.luminance(x, y) < 128) ++ink;
  EXPECT_GT(ink, 10);

  // No ink outside the box either (fixed-advance metric is airtight).
  int stray = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.luminance(x, y) < 250 &&
          !box.contains({x + 0.5, y + 0.5}))
        ++stray;
  EXPECT_EQ(stray, 0);
}

TEST(Rasterize, PngRoundTripKeepsDimensions) {
  Scene s = white_scene();
  s.elements.push_back({SceneCircle{{256, 256}, 120},
                        Style{{0, 0, 255}, 4.0, std::nullopt}});
  Image img = decode_png(rasterize(s));
  std::vector<uint8_t> again = encode_png(img);
  Image img2 = decode_png(again);
  ASSERT_EQ(img2.width, 512);
  ASSERT_EQ(img2.height, 512);
  EXPECT_EQ(img.rgb, img2.rgb);
}

TEST(Rasterize, CircleStrokeProbes) {
  Scene s = white_scene();
  s.elements.push_back({SceneCircle{{256, 256}, 100},
                        Style{{255, 0, 0}, 6.0, std::nullopt}});
  Image img = rasterize_image(s);
  // On the stroke: strongly red.
  const uint8_t* on = img.pixel(256 + 100, 256);
  EXPECT_GT(static_cast<int>(on[0]) - on[2], 100);
  // Center and far outside stay white.
  EXPECT_GT(img.luminance(256, 256), 254.5);
  EXPECT_GT(img.luminance(20, 20), 254.5);
}

TEST(Rasterize, RotatedSquareStrokeProbes) {
  Scene s = white_scene();
  s.elements.push_back({SceneSquare{{256, 256}, 100, 0.0},
                        Style{{0, 0, 0}, 4.0, std::nullopt}});
  Image img = rasterize_image(s);
  EXPECT_LT(img.luminance(256, 156), 100.0);  // top edge
  EXPECT_LT(img.luminance(156, 256), 100.0);  // left edge
  EXPECT_GT(img.luminance(256, 256), 254.5);  // hollow center
}

// An annotation ellipse sized 1.3x a glyph cell must fully contain that
// glyph's ink. Probed per pixel over 50 seeded words.
TEST(Rasterize, EllipseFromGlyphBoxContainsInk) {
  Rng rng(derive_seed(31, 0, 0));
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  for (int trial = 0; trial < 50; ++trial) {
    std::string word;
    int len = rng.uniform_int(5, 10);
    for (int i = 0; i < len; ++i)
      word.push_back(alphabet[rng.uniform_int(0, 25)]);
    double fs = rng.uniform_real(52, 64);
    Point origin{(512 - len * glyph_advance(fs)) / 2,
                 (512 - glyph_line_height(fs)) / 2};
    int idx = rng.uniform_int(0, len - 1);
    Rect box = glyph_box(word, idx, origin, fs);

    Scene s = white_scene();
    s.elements.push_back({GlyphRun{word, origin, fs},
                          Style{{0, 0, 0}, 1.0, std::nullopt}});
    Image img = rasterize_image(s);

    Point c = box.center();
    double rx = 1.3 * box.w / 2, ry = 1.3 * box.h / 2;
    for (int y = static_cast<int>(box.y) - 1; y <= box.y + box.h + 1; ++y) {
      for (int x = static_cast<int>(box.x) - 1; x <= box.x + box.w + 1; ++x) {
        if (img.luminance(x, y) >= 250) continue;
        if (!box.contains({x + 0.5, y + 0.5})) continue;  // neighbor glyph
        double nx = (x + 0.5 - c.x) / rx, ny = (y + 0.5 - c.y) / ry;
        EXPECT_LE(nx * nx + ny * ny, 1.0)
            << "word '" << word << "' glyph " << idx << " ink at " << x << ","
            << y;
      }
    }
  }
}

TEST(Rasterize, EllipseStrokeProbes) {
  Scene s = white_scene();
  s.elements.push_back({AnnotationEllipse{{256, 256}, 80, 40},
                        Style{{255, 0, 0}, 4.0, std::nullopt}});
  Image img = rasterize_image(s);
  EXPECT_LT(img.luminance(256 + 80, 256), 200.0);  // right apex
  EXPECT_LT(img.luminance(256, 256 + 40), 200.0);  // bottom apex
  EXPECT_GT(img.luminance(256, 256), 254.5);       // hollow
  // Off-axis boundary point: x = rx*cos(45deg), y = ry*sin(45deg).
  int bx = static_cast<int>(256 + 80 * std::cos(0.785398));
  int by = static_cast<int>(256 + 40 * std::sin(0.785398));
  EXPECT_LT(img.luminance(bx, by), 200.0);
}

TEST(Rasterize, FilledDotProbes) {
  Scene s = white_scene();
  s.elements.push_back(
      {SceneCircle{{300, 300}, 5}, Style{{0, 0, 0}, 1.0, Color{0, 0, 0}}});
  Image img = rasterize_image(s);
  EXPECT_LT(img.luminance(300, 300), 64.0);
}

TEST(DecodePng, RejectsGarbage) {
  EXPECT_THROW(decode_png({1, 2, 3, 4}), RasterError);
}

}  // namespace
}  // namespace geoprobe
