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
// Seeded procedural generators for the eight benchmark tasks. Every
// instance is a pure function of (master seed, task id, index): generators
// rejection-sample until layout margins hold, compute ground truth through
// the geometry module, and emit a Scene plus typed answer. Margins are
// chosen so that no predicate decision ever sits near the numeric or the
// visual boundary.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <atomic>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "geoprobe/answer.hpp"
#include "geoprobe/font.hpp"
#include "geoprobe/geometry.hpp"
#include "geoprobe/raster.hpp"
#include "geoprobe/rng.hpp"
#include "geoprobe/scene.hpp"
#include "geoprobe/svg.hpp"
#include "geoprobe/words.hpp"

namespace geoprobe {

inline constexpr int kRejectionBudget = 10000;
inline constexpr double kCanvasMargin = 40;

// Fixed 8-color palette; every entry keeps >= 100 luminance points of
// contrast against the white background.
inline const std::vector<Color>& task_palette() {
  static const std::vector<Color> colors = {
      {0, 0, 0},      // black
      {0, 0, 255},    // blue
      {255, 0, 0},    // red
      {0, 128, 0},    // green
      {128, 0, 128},  // purple
      {204, 102, 0},  // orange
      {0, 128, 128},  // teal
      {128, 0, 0},    // maroon
  };
  return colors;
}

inline const Color kGridGray{200, 200, 200};
inline const Color kStationGray{120, 120, 120};

// Subway-task layout constants; the truth recomputation inverts them.
inline constexpr int kStationGridSize = 5;
inline constexpr double kStationSpacing = 88;
inline constexpr double kStationOrigin = 80;
inline constexpr double kStationLabelOffset = 24;
inline constexpr double kStationLabelFont = 24;
inline constexpr double kPathStrokeWidth = 5;

inline Point station_node_position(GridNode n) {
  return {kStationOrigin + n.col * kStationSpacing,
          kStationOrigin + n.row * kStationSpacing};
}

struct GeneratorConfig {
  int instances_per_task = 100;
  uint64_t master_seed = 0;
  int canvas_width = 512;
  int canvas_height = 512;
  std::vector<int> tasks = {1, 2, 3, 4, 5, 6, 7, 8};

  // Per-task parameter ranges.
  int t1_crossings_min = 0, t1_crossings_max = 2;
  int t3_squares_min = 2, t3_squares_max = 5;
  double t3_clearance = 8;
  int t4_rings_min = 4, t4_rings_max = 9;
  double t5_font_min = 52, t5_font_max = 64;
  int t6_paths_min = 0, t6_paths_max = 3;
  int t6_distractors_min = 1, t6_distractors_max = 3;
  int t7_dims_min = 3, t7_dims_max = 9;
  double t8_radius_min = 50, t8_radius_max = 100;

  nlohmann::ordered_json echo() const {
    return {{"instances_per_task", instances_per_task},
            {"master_seed", master_seed},
            {"canvas", {{"width", canvas_width}, {"height", canvas_height}}},
            {"tasks", tasks},
            {"ranges",
             {{"t1_crossings", {t1_crossings_min, t1_crossings_max}},
              {"t3_squares", {t3_squares_min, t3_squares_max}},
              {"t3_clearance", t3_clearance},
              {"t4_rings", {t4_rings_min, t4_rings_max}},
              {"t5_font", {t5_font_min, t5_font_max}},
              {"t6_paths", {t6_paths_min, t6_paths_max}},
              {"t6_distractors", {t6_distractors_min, t6_distractors_max}},
              {"t7_dims", {t7_dims_min, t7_dims_max}},
              {"t8_radius", {t8_radius_min, t8_radius_max}}}}};
  }
};

struct TaskInstance {
  std::string instance_id;
  int task_id = 0;
  uint64_t seed = 0;
  std::string question;
  AnswerValue ground_truth{Count(0)};
  std::string image_path;
  std::string svg_path;
  nlohmann::ordered_json params;
};

struct GeneratedInstance {
  TaskInstance meta;
  Scene scene;
};

inline std::string question_for_task(int task_id) {
  switch (task_id) {
    case 1:
      return "How many times do the blue line and the red line intersect? "
             "Answer with a number.";
    case 2:
      return "Do the two line segments intersect? Answer yes or no.";
    case 3:
      return "How many squares are in the image? Answer with a number.";
    case 4:
      return "How many circles are in the image? Answer with a number.";
    case 5:
      return "Which letter in the word is circled in red? Answer with one "
             "letter.";
    case 6:
      return "How many paths connect station A to station B? Answer with a "
             "number.";
    case 7:
      return "How many rows and how many columns are in the grid? Answer as "
             "rows,columns.";
    case 8:
      return "Do the two circles intersect? Answer yes or no.";
    default:
      throw std::invalid_argument("unknown task id " + std::to_string(task_id));
  }
}

inline std::string instance_name(int task_id, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%d_%04d", task_id, index);
  return buf;
}

namespace detail {

// Count-valued tasks draw their target from a per-block shuffle so every
// run of |range| consecutive indices covers the whole range.
inline int blocked_target(uint64_t master, int task_id, int index, int lo,
                          int hi) {
  int size = hi - lo + 1;
  int block = index / size;
  Rng rng(derive_seed(master, static_cast<uint64_t>(task_id), block, 0xb10cull));
  std::vector<int> perm;
  for (int v = lo; v <= hi; ++v) perm.push_back(v);
  rng.shuffle(perm);
  return perm[index % size];
}

inline std::vector<Color> pick_distinct_colors(Rng& rng, size_t n,
                                               bool exclude_black = false) {
  std::vector<Color> pool = task_palette();
  if (exclude_black) pool.erase(pool.begin());
  rng.shuffle(pool);
  pool.resize(n);
  return pool;
}

[[noreturn]] inline void budget_exhausted(int task_id, uint64_t seed) {
  throw GenerationError("task " + std::to_string(task_id) +
                        ": rejection budget exhausted (seed " +
                        std::to_string(seed) + ")");
}

// --- Task 1: intersections of two polylines ------------------------------

inline GeneratedInstance gen_line_intersections(const GeneratorConfig& cfg,
                                                int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 1, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;
  const int target = blocked_target(cfg.master_seed, 1, index,
                                    cfg.t1_crossings_min, cfg.t1_crossings_max);
  const int samples = 4;
  std::vector<double> xs(samples);
  for (int i = 0; i < samples; ++i)
    xs[i] = kCanvasMargin + i * (w - 2 * kCanvasMargin) / (samples - 1);

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    std::vector<double> y1(samples), y2(samples);
    for (int i = 0; i < samples; ++i) y1[i] = rng.uniform_real(60, h - 60);

    // Sign pattern of (y2 - y1) with exactly `target` flips.
    std::vector<int> gaps = rng.sample_distinct(0, samples - 2, target);
    std::sort(gaps.begin(), gaps.end());
    double sign = rng.coin() ? 1.0 : -1.0;
    bool ok = true;
    for (int i = 0; i < samples; ++i) {
      if (std::find(gaps.begin(), gaps.end(), i - 1) != gaps.end())
        sign = -sign;
      double mag = target == 0 ? rng.uniform_real(30, 170)
                               : rng.uniform_real(12, 170);
      y2[i] = y1[i] + sign * mag;
      if (y2[i] < 60 || y2[i] > h - 60) ok = false;
    }
    if (!ok) continue;

    std::vector<Point> pts1, pts2;
    for (int i = 0; i < samples; ++i) {
      pts1.push_back({xs[i], y1[i]});
      pts2.push_back({xs[i], y2[i]});
    }
    Polyline p1(pts1), p2(pts2);
    if (count_polyline_intersections(p1, p2) != target) continue;

    // Crossing locations, for the margin checks.
    std::vector<Point> crossings;
    for (size_t i = 0; i + 1 < pts1.size(); ++i) {
      if (auto pt = segment_intersection(p1.segment(i), p2.segment(i)))
        crossings.push_back(*pt);
    }
    ok = static_cast<int>(crossings.size()) == target;
    for (const Point& c : crossings) {
      for (double x : xs)
        if (std::abs(c.x - x) < 10) ok = false;
      for (const Point& other : crossings)
        if (&other != &c && distance(c, other) < 10) ok = false;
    }
    if (!ok) continue;

    GeneratedInstance out;
    out.scene.width = cfg.canvas_width;
    out.scene.height = cfg.canvas_height;
    out.scene.elements.push_back(
        {ScenePolyline{pts1}, Style{{0, 0, 255}, 4.0, std::nullopt}});
    out.scene.elements.push_back(
        {ScenePolyline{pts2}, Style{{255, 0, 0}, 4.0, std::nullopt}});
    out.meta.ground_truth = Count(count_polyline_intersections(p1, p2));
    out.meta.params = {{"crossings", target}, {"samples", samples}};
    out.meta.seed = seed;
    return out;
  }
  budget_exhausted(1, seed);
}

// --- Task 2: do two segments intersect ------------------------------------

inline GeneratedInstance gen_segment_pair(const GeneratorConfig& cfg,
                                          int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 2, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;
  const bool want = index % 2 == 0;

  auto random_point = [&] {
    return Point{rng.uniform_real(kCanvasMargin, w - kCanvasMargin),
                 rng.uniform_real(kCanvasMargin, h - kCanvasMargin)};
  };

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    Point a = random_point(), b = random_point();
    Point c = random_point(), d = random_point();
    if (distance(a, b) < 120 || distance(c, d) < 120) continue;
    Segment s1(a, b), s2(c, d);
    if (segments_collinear_overlap(s1, s2)) continue;

    auto inter = segment_intersection(s1, s2);
    if (want) {
      if (!inter) continue;
      // Proper interior crossing, well clear of all four endpoints.
      bool clear = true;
      for (Point e : {a, b, c, d})
        if (distance(*inter, e) < 15) clear = false;
      if (!clear) continue;
    } else {
      if (inter) continue;
      if (segment_segment_distance(s1, s2) < 12) continue;
    }

    std::vector<Color> colors = pick_distinct_colors(rng, 2);
    GeneratedInstance out;
    out.scene.width = cfg.canvas_width;
    out.scene.height = cfg.canvas_height;
    out.scene.elements.push_back(
        {ScenePolyline{{a, b}}, Style{colors[0], 4.0, std::nullopt}});
    out.scene.elements.push_back(
        {ScenePolyline{{c, d}}, Style{colors[1], 4.0, std::nullopt}});
    out.meta.ground_truth = YesNo(inter.has_value());
    out.meta.params = {{"intersects", want}};
    out.meta.seed = seed;
    return out;
  }
  budget_exhausted(2, seed);
}

// --- Task 3: nested squares ------------------------------------------------

inline GeneratedInstance gen_nested_squares(const GeneratorConfig& cfg,
                                            int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 3, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;
  const int n = blocked_target(cfg.master_seed, 3, index, cfg.t3_squares_min,
                               cfg.t3_squares_max);
  const double clearance = cfg.t3_clearance;
  const double quarter = std::numbers::pi / 2;

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    std::vector<Square> squares;
    Point center{w / 2 + rng.uniform_real(-18, 18),
                 h / 2 + rng.uniform_real(-18, 18)};
    squares.emplace_back(center, rng.uniform_real(120, 140),
                         rng.uniform_real(0, quarter * 0.999));
    bool ok = true;
    for (int layer = 1; layer < n; ++layer) {
      const Square& prev = squares.back();
      bool placed = false;
      for (int t = 0; t < 200 && !placed; ++t) {
        double hs = rng.uniform_real(0.60, 0.74) * prev.half_size();
        if (hs < 14) break;
        double rot = rng.uniform_real(0, quarter * 0.999);
        double off_r = rng.uniform_real(0, 0.12 * prev.half_size());
        double off_a = rng.uniform_real(0, 2 * std::numbers::pi);
        Point c{prev.center().x + off_r * std::cos(off_a),
                prev.center().y + off_r * std::sin(off_a)};
        Square cand(c, hs, rot);
        bool fits = true;
        for (Point corner : cand.corners())
          if (prev.frame_linf(corner) > prev.half_size() - clearance)
            fits = false;
        if (fits) {
          squares.push_back(cand);
          placed = true;
        }
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (!ok || !squares_strictly_nested(squares, clearance)) continue;

    GeneratedInstance out;
    out.scene.width = cfg.canvas_width;
    out.scene.height = cfg.canvas_height;
    for (const Square& s : squares) {
      out.scene.elements.push_back(
          {SceneSquare{s.center(), s.half_size(), s.rotation()},
           Style{{0, 0, 0}, 3.0, std::nullopt}});
    }
    out.meta.ground_truth = Count(n);
    out.meta.params = {{"squares", n}, {"clearance", clearance}};
    out.meta.seed = seed;
    return out;
  }
  budget_exhausted(3, seed);
}

// --- Task 4: interlocking rings ---------------------------------------------

// Two offset rows; same-row spacing 2.3r keeps row neighbors apart while
// each bottom ring overlaps its two diagonal neighbors, so an N-ring scene
// always has exactly N-1 overlapping pairs.
inline GeneratedInstance gen_olympic_rings(const GeneratorConfig& cfg,
                                           int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 4, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;
  const int n = blocked_target(cfg.master_seed, 4, index, cfg.t4_rings_min,
                               cfg.t4_rings_max);
  const int top = (n + 1) / 2, bottom = n - top;
  const double stroke = 4.0;

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    double r = rng.uniform_real(34, 38);
    double s = 2.3 * r, dy = 1.0 * r;
    double width = (top - 1) * s + 2 * r + (bottom == top ? s / 2 : 0);
    double cx = w / 2 + rng.uniform_real(-8, 8);
    double cy = h / 2 + rng.uniform_real(-12, 12);
    double x0 = cx - width / 2 + r;
    double top_y = cy - dy / 2, bot_y = cy + dy / 2;

    std::vector<Circle> rings;
    for (int i = 0; i < top; ++i) rings.emplace_back(Point{x0 + i * s, top_y}, r);
    for (int j = 0; j < bottom; ++j)
      rings.emplace_back(Point{x0 + s / 2 + j * s, bot_y}, r);

    bool ok = true;
    for (const Circle& c : rings) {
      if (c.center().x - r < 20 || c.center().x + r > w - 20 ||
          c.center().y - r < 20 || c.center().y + r > h - 20)
        ok = false;
    }
    if (!ok || ring_overlap_count(rings) != n - 1) continue;

    GeneratedInstance out;
    out.scene.width = cfg.canvas_width;
    out.scene.height = cfg.canvas_height;
    const std::vector<Color>& pal = task_palette();
    for (size_t i = 0; i < rings.size(); ++i) {
      out.scene.elements.push_back(
          {SceneCircle{rings[i].center(), rings[i].radius()},
           Style{pal[(1 + i) % pal.size()], stroke, std::nullopt}});
    }
    out.meta.ground_truth = Count(n);
    out.meta.params = {{"rings", n}, {"radius", r}, {"overlap_pairs", n - 1}};
    out.meta.seed = seed;
    return out;
  }
  budget_exhausted(4, seed);
}

// --- Task 5: letter circled in red -----------------------------------------

inline GeneratedInstance gen_circled_letter(const GeneratorConfig& cfg,
                                            int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 5, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;

  const std::string word =
      kWordList[rng.uniform_int(0, static_cast<int>(kWordList.size()) - 1)];
  const double fs = rng.uniform_real(cfg.t5_font_min, cfg.t5_font_max);
  const int idx = rng.uniform_int(0, static_cast<int>(word.size()) - 1);
  Point origin{(w - word.size() * glyph_advance(fs)) / 2,
               (h - glyph_line_height(fs)) / 2};
  Rect box = glyph_box(word, idx, origin, fs);

  GeneratedInstance out;
  out.scene.width = cfg.canvas_width;
  out.scene.height = cfg.canvas_height;
  out.scene.elements.push_back(
      {GlyphRun{word, origin, fs}, Style{{0, 0, 0}, 1.0, std::nullopt}});
  out.scene.elements.push_back(
      {AnnotationEllipse{box.center(), 1.3 * box.w / 2, 1.3 * box.h / 2},
       Style{{255, 0, 0}, 3.0, std::nullopt}});
  out.meta.ground_truth = Letter(word[idx]);
  out.meta.params = {{"word", word}, {"index", idx}, {"font_size", fs}};
  out.meta.seed = seed;
  return out;
}

// --- Task 6: subway paths ----------------------------------------------------

inline GeneratedInstance gen_subway_paths(const GeneratorConfig& cfg,
                                          int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 6, index);
  Rng rng(seed);
  const int gs = kStationGridSize;
  const int k_paths = blocked_target(cfg.master_seed, 6, index,
                                     cfg.t6_paths_min, cfg.t6_paths_max);

  // Border nodes of the station grid.
  std::vector<GridNode> border;
  for (int r = 0; r < gs; ++r)
    for (int c = 0; c < gs; ++c)
      if (r == 0 || c == 0 || r == gs - 1 || c == gs - 1)
        border.push_back({r, c});

  auto edge_key = [gs](GridNode a, GridNode b) {
    int ia = a.row * gs + a.col, ib = b.row * gs + b.col;
    return std::min(ia, ib) * gs * gs + std::max(ia, ib);
  };

  // Randomized DFS for a simple path that uses no consumed edge.
  auto find_path = [&](GridNode from, GridNode to,
                       std::set<int>& used) -> std::vector<GridNode> {
    std::vector<GridNode> path;
    std::vector<bool> visited(gs * gs, false);
    std::function<bool(GridNode)> visit = [&](GridNode cur) -> bool {
      visited[cur.row * gs + cur.col] = true;
      path.push_back(cur);
      if (cur == to) return true;
      std::vector<GridNode> nbs;
      if (cur.row > 0) nbs.push_back({cur.row - 1, cur.col});
      if (cur.row < gs - 1) nbs.push_back({cur.row + 1, cur.col});
      if (cur.col > 0) nbs.push_back({cur.row, cur.col - 1});
      if (cur.col < gs - 1) nbs.push_back({cur.row, cur.col + 1});
      rng.shuffle(nbs);
      for (GridNode nb : nbs) {
        if (visited[nb.row * gs + nb.col]) continue;
        if (used.count(edge_key(cur, nb))) continue;
        if (visit(nb)) return true;
      }
      path.pop_back();
      return false;
    };
    if (!visit(from)) path.clear();
    return path;
  };

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    std::vector<int> pick = rng.sample_distinct(
        0, static_cast<int>(border.size()) - 1, 4);
    StationGraph graph;
    graph.rows = gs;
    graph.cols = gs;
    graph.terminals = {{'A', border[pick[0]]},
                       {'B', border[pick[1]]},
                       {'C', border[pick[2]]},
                       {'D', border[pick[3]]}};
    graph.query = {'A', 'B'};
    GridNode a = graph.terminals['A'], b = graph.terminals['B'];
    if (std::abs(a.row - b.row) + std::abs(a.col - b.col) < 2) continue;

    std::set<int> used;
    bool ok = true;
    std::vector<std::vector<GridNode>> walks;
    for (int p = 0; p < k_paths && ok; ++p) {
      auto walk = find_path(a, b, used);
      if (walk.empty()) {
        ok = false;
        break;
      }
      for (size_t i = 0; i + 1 < walk.size(); ++i)
        used.insert(edge_key(walk[i], walk[i + 1]));
      walks.push_back(std::move(walk));
    }
    if (!ok) continue;

    const int distractors =
        rng.uniform_int(cfg.t6_distractors_min, cfg.t6_distractors_max);
    const std::vector<std::pair<char, char>> other_pairs = {
        {'C', 'D'}, {'A', 'C'}, {'A', 'D'}, {'B', 'C'}, {'B', 'D'}};
    for (int m = 0; m < distractors && ok; ++m) {
      auto [u, v] = other_pairs[rng.uniform_int(
          0, static_cast<int>(other_pairs.size()) - 1)];
      auto walk = find_path(graph.terminals[u], graph.terminals[v], used);
      if (walk.empty()) {
        ok = false;
        break;
      }
      for (size_t i = 0; i + 1 < walk.size(); ++i)
        used.insert(edge_key(walk[i], walk[i + 1]));
      walks.push_back(std::move(walk));
    }
    if (!ok) continue;

    std::vector<Color> colors =
        pick_distinct_colors(rng, walks.size(), /*exclude_black=*/true);
    for (size_t i = 0; i < walks.size(); ++i)
      graph.paths.push_back({colors[i].hex(), walks[i]});
    graph.validate();
    if (count_terminal_paths(graph) != k_paths) continue;

    GeneratedInstance out;
    out.scene.width = cfg.canvas_width;
    out.scene.height = cfg.canvas_height;
    // Grid lines.
    for (int r = 0; r < gs; ++r) {
      out.scene.elements.push_back(
          {ScenePolyline{{station_node_position({r, 0}),
                          station_node_position({r, gs - 1})}},
           Style{kGridGray, 1.5, std::nullopt}});
    }
    for (int c = 0; c < gs; ++c) {
      out.scene.elements.push_back(
          {ScenePolyline{{station_node_position({0, c}),
                          station_node_position({gs - 1, c})}},
           Style{kGridGray, 1.5, std::nullopt}});
    }
    // Paths.
    for (size_t i = 0; i < walks.size(); ++i) {
      std::vector<Point> pts;
      for (GridNode nnode : walks[i]) pts.push_back(station_node_position(nnode));
      out.scene.elements.push_back(
          {ScenePolyline{pts}, Style{colors[i], kPathStrokeWidth, std::nullopt}});
    }
    // Station dots.
    for (int r = 0; r < gs; ++r)
      for (int c = 0; c < gs; ++c)
        out.scene.elements.push_back(
            {SceneCircle{station_node_position({r, c}), 3},
             Style{kStationGray, 1.0, kStationGray}});
    // Terminal dots and labels.
    Point grid_center = station_node_position({gs / 2, gs / 2});
    for (auto [label, nnode] : graph.terminals) {
      Point pos = station_node_position(nnode);
      out.scene.elements.push_back(
          {SceneCircle{pos, 5}, Style{{0, 0, 0}, 1.0, Color{0, 0, 0}}});
      Point dir = pos - grid_center;
      double len = norm(dir);
      dir = len > 0 ? (1.0 / len) * dir : Point{0, -1};
      Point anchor = pos + kStationLabelOffset * dir;
      Point origin{anchor.x - glyph_advance(kStationLabelFont) / 2,
                   anchor.y - glyph_line_height(kStationLabelFont) / 2};
      out.scene.elements.push_back(
          {GlyphRun{std::string(1, label), origin, kStationLabelFont},
           Style{{0, 0, 0}, 1.0, std::nullopt}});
    }
    out.meta.ground_truth = Count(count_terminal_paths(graph));
    out.meta.params = {{"paths", k_paths}, {"distractors", distractors}};
    out.meta.seed = seed;
    return out;
  }
  budget_exhausted(6, seed);
}

// --- Task 7: grid dimensions -------------------------------------------------

inline GeneratedInstance gen_grid(const GeneratorConfig& cfg, int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 7, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;
  const int rows = rng.uniform_int(cfg.t7_dims_min, cfg.t7_dims_max);
  const int cols = rng.uniform_int(cfg.t7_dims_min, cfg.t7_dims_max);
  const double ix = rng.uniform_real(50, 80), iy = rng.uniform_real(50, 80);

  GeneratedInstance out;
  out.scene.width = cfg.canvas_width;
  out.scene.height = cfg.canvas_height;
  for (int r = 0; r <= rows; ++r) {
    double y = iy + r * (h - 2 * iy) / rows;
    out.scene.elements.push_back(
        {ScenePolyline{{{ix, y}, {w - ix, y}}}, Style{{0, 0, 0}, 2.0, std::nullopt}});
  }
  for (int c = 0; c <= cols; ++c) {
    double x = ix + c * (w - 2 * ix) / cols;
    out.scene.elements.push_back(
        {ScenePolyline{{{x, iy}, {x, h - iy}}}, Style{{0, 0, 0}, 2.0, std::nullopt}});
  }
  out.meta.ground_truth = GridDims(rows, cols);
  out.meta.params = {{"rows", rows}, {"cols", cols}};
  out.meta.seed = seed;
  return out;
}

// --- Task 8: do two circles intersect ---------------------------------------

inline GeneratedInstance gen_circle_pair(const GeneratorConfig& cfg,
                                         int index) {
  const uint64_t seed = derive_seed(cfg.master_seed, 8, index);
  Rng rng(seed);
  const double w = cfg.canvas_width, h = cfg.canvas_height;
  const bool want = index % 2 == 0;
  const double stroke = 4.0;
  const double margin = 3 * stroke;  // distance from any tangency boundary

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    double r1 = rng.uniform_real(cfg.t8_radius_min, cfg.t8_radius_max);
    double r2 = rng.uniform_real(cfg.t8_radius_min, cfg.t8_radius_max);
    double d;
    if (want) {
      double lo = std::abs(r1 - r2) + margin, hi = r1 + r2 - margin;
      if (lo >= hi) continue;
      d = rng.uniform_real(lo, hi);
    } else {
      d = rng.uniform_real(r1 + r2 + margin, r1 + r2 + 140);
    }
    Point c1{rng.uniform_real(20 + r1, w - 20 - r1),
             rng.uniform_real(20 + r1, h - 20 - r1)};
    double ang = rng.uniform_real(0, 2 * std::numbers::pi);
    Point c2{c1.x + d * std::cos(ang), c1.y + d * std::sin(ang)};
    if (c2.x - r2 < 20 || c2.x + r2 > w - 20 || c2.y - r2 < 20 ||
        c2.y + r2 > h - 20)
      continue;

    Circle a(c1, r1), b(c2, r2);
    if (circles_intersect(a, b) != want) continue;

    std::vector<Color> colors = pick_distinct_colors(rng, 2);
    GeneratedInstance out;
    out.scene.width = cfg.canvas_width;
    out.scene.height = cfg.canvas_height;
    out.scene.elements.push_back(
        {SceneCircle{c1, r1}, Style{colors[0], stroke, std::nullopt}});
    out.scene.elements.push_back(
        {SceneCircle{c2, r2}, Style{colors[1], stroke, std::nullopt}});
    out.meta.ground_truth = YesNo(circles_intersect(a, b));
    out.meta.params = {{"intersects", want},
                       {"center_distance", d},
                       {"radii", {r1, r2}}};
    out.meta.seed = seed;
    return out;
  }
  budget_exhausted(8, seed);
}

}  // namespace detail

// Deterministic function of (config.master_seed, task_id, index).
inline GeneratedInstance generate_instance(const GeneratorConfig& cfg,
                                           int task_id, int index) {
  GeneratedInstance out;
  switch (task_id) {
    case 1: out = detail::gen_line_intersections(cfg, index); break;
    case 2: out = detail::gen_segment_pair(cfg, index); break;
    case 3: out = detail::gen_nested_squares(cfg, index); break;
    case 4: out = detail::gen_olympic_rings(cfg, index); break;
    case 5: out = detail::gen_circled_letter(cfg, index); break;
    case 6: out = detail::gen_subway_paths(cfg, index); break;
    case 7: out = detail::gen_grid(cfg, index); break;
    case 8: out = detail::gen_circle_pair(cfg, index); break;
    default:
      throw std::invalid_argument("unknown task id " + std::to_string(task_id));
  }
  out.meta.instance_id = instance_name(task_id, index);
  out.meta.task_id = task_id;
  out.meta.question = question_for_task(task_id);
  out.meta.image_path = "images/" + out.meta.instance_id + ".png";
  out.meta.svg_path = "svg/" + out.meta.instance_id + ".svg";
  validate_scene(out.scene);
  return out;
}

// --- Ground-truth recomputation from a stored scene --------------------------

// Re-derives the answer for a task from the drawing alone (as parsed back
// from the stored SVG), through the same geometry oracles the generators
// used. Any inconsistency throws.
inline AnswerValue recompute_truth(int task_id, const Scene& scene) {
  auto polylines_with = [&](auto&& pred) {
    std::vector<const ScenePolyline*> out;
    std::vector<const Style*> styles;
    for (const SceneElement& e : scene.elements) {
      if (const auto* p = std::get_if<ScenePolyline>(&e.shape))
        if (pred(e.style)) {
          out.push_back(p);
          styles.push_back(&e.style);
        }
    }
    return out;
  };
  auto circles = [&] {
    std::vector<std::pair<SceneCircle, Style>> out;
    for (const SceneElement& e : scene.elements)
      if (const auto* c = std::get_if<SceneCircle>(&e.shape))
        out.push_back({*c, e.style});
    return out;
  };

  switch (task_id) {
    case 1: {
      auto lines = polylines_with([](const Style&) { return true; });
      if (lines.size() != 2) throw Error("recompute: task 1 expects 2 polylines");
      std::vector<Point> a = lines[0]->points, b = lines[1]->points;
      return Count(count_polyline_intersections(Polyline(a), Polyline(b)));
    }
    case 2: {
      auto lines = polylines_with([](const Style&) { return true; });
      if (lines.size() != 2 || lines[0]->points.size() != 2 ||
          lines[1]->points.size() != 2)
        throw Error("recompute: task 2 expects 2 segments");
      Segment s1(lines[0]->points[0], lines[0]->points[1]);
      Segment s2(lines[1]->points[0], lines[1]->points[1]);
      return YesNo(segment_intersection(s1, s2).has_value());
    }
    case 3: {
      std::vector<Square> squares;
      for (const SceneElement& e : scene.elements)
        if (const auto* s = std::get_if<SceneSquare>(&e.shape))
          squares.emplace_back(s->center, s->half_size, s->rotation);
      if (squares.size() < 2) throw Error("recompute: task 3 expects squares");
      // Stored coordinates are rounded to 3 decimals; shave the clearance
      // accordingly before re-checking the nesting invariant.
      if (!squares_strictly_nested(squares, 8 - 0.05))
        throw Error("recompute: task 3 squares not nested");
      return Count(static_cast<int>(squares.size()));
    }
    case 4: {
      std::vector<Circle> rings;
      for (const auto& [c, st] : circles()) rings.emplace_back(c.center, c.radius);
      if (rings.empty()) throw Error("recompute: task 4 expects circles");
      if (ring_overlap_count(rings) != static_cast<int>(rings.size()) - 1)
        throw Error("recompute: task 4 overlap pattern violated");
      return Count(static_cast<int>(rings.size()));
    }
    case 5: {
      const GlyphRun* word = nullptr;
      const AnnotationEllipse* mark = nullptr;
      const Style* mark_style = nullptr;
      for (const SceneElement& e : scene.elements) {
        if (const auto* g = std::get_if<GlyphRun>(&e.shape)) word = g;
        if (const auto* el = std::get_if<AnnotationEllipse>(&e.shape)) {
          mark = el;
          mark_style = &e.style;
        }
      }
      if (!word || !mark) throw Error("recompute: task 5 expects word + ellipse");
      if (!(mark_style->stroke == Color{255, 0, 0}))
        throw Error("recompute: task 5 ellipse is not red");
      double best = 1e18;
      size_t best_idx = 0;
      for (size_t i = 0; i < word->text.size(); ++i) {
        Point c = glyph_box(word->text, i, word->origin, word->font_size).center();
        double d = distance(c, mark->center);
        if (d < best) {
          best = d;
          best_idx = i;
        }
      }
      return Letter(word->text[best_idx]);
    }
    case 6: {
      auto grid_lines = polylines_with(
          [](const Style& st) { return st.stroke == kGridGray; });
      auto path_lines = polylines_with([](const Style& st) {
        return st.stroke_width >= kPathStrokeWidth - 0.5 &&
               !(st.stroke == kGridGray);
      });
      std::vector<double> xs, ys;
      for (const auto* g : grid_lines) {
        if (std::abs(g->points.front().y - g->points.back().y) < 1e-6)
          ys.push_back(g->points.front().y);
        else
          xs.push_back(g->points.front().x);
      }
      std::sort(xs.begin(), xs.end());
      std::sort(ys.begin(), ys.end());
      if (xs.empty() || ys.empty())
        throw Error("recompute: task 6 station grid not found");
      auto nearest_node = [&](Point p) {
        auto nearest = [](const std::vector<double>& v, double q) {
          size_t best = 0;
          for (size_t i = 1; i < v.size(); ++i)
            if (std::abs(v[i] - q) < std::abs(v[best] - q)) best = i;
          return best;
        };
        return GridNode{static_cast<int>(nearest(ys, p.y)),
                        static_cast<int>(nearest(xs, p.x))};
      };
      StationGraph g;
      g.rows = static_cast<int>(ys.size());
      g.cols = static_cast<int>(xs.size());
      for (const SceneElement& e : scene.elements) {
        if (const auto* run = std::get_if<GlyphRun>(&e.shape)) {
          if (run->text.size() != 1) continue;
          Point anchor{run->origin.x + glyph_advance(run->font_size) / 2,
                       run->origin.y + glyph_line_height(run->font_size) / 2};
          g.terminals[run->text[0]] = nearest_node(anchor);
        }
      }
      int count = 0;
      GridNode a = g.terminals.at('A'), b = g.terminals.at('B');
      for (const auto* p : path_lines) {
        GridNode from = nearest_node(p->points.front());
        GridNode to = nearest_node(p->points.back());
        Point fp = p->points.front(), tp = p->points.back();
        if (distance(fp, Point{xs[from.col], ys[from.row]}) > 1.0 ||
            distance(tp, Point{xs[to.col], ys[to.row]}) > 1.0)
          throw Error("recompute: task 6 path endpoint off-grid");
        if ((from == a && to == b) || (from == b && to == a)) ++count;
      }
      return Count(count);
    }
    case 7: {
      auto lines = polylines_with([](const Style&) { return true; });
      int horizontal = 0, vertical = 0;
      for (const auto* p : lines) {
        if (p->points.size() != 2) throw Error("recompute: task 7 bad line");
        if (std::abs(p->points[0].y - p->points[1].y) < 1e-6)
          ++horizontal;
        else if (std::abs(p->points[0].x - p->points[1].x) < 1e-6)
          ++vertical;
        else
          throw Error("recompute: task 7 slanted line");
      }
      if (horizontal < 2 || vertical < 2)
        throw Error("recompute: task 7 grid incomplete");
      return GridDims(horizontal - 1, vertical - 1);
    }
    case 8: {
      auto cs = circles();
      if (cs.size() != 2) throw Error("recompute: task 8 expects 2 circles");
      return YesNo(circles_intersect(Circle(cs[0].first.center, cs[0].first.radius),
                                     Circle(cs[1].first.center, cs[1].first.radius)));
    }
    default:
      throw std::invalid_argument("unknown task id " + std::to_string(task_id));
  }
}

// --- Dataset writing, loading, verification ----------------------------------

namespace detail {

inline void write_file(const std::filesystem::path& path,
                       const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_file(const std::filesystem::path& path,
                       const std::vector<uint8_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace detail

inline nlohmann::ordered_json instance_to_json(const TaskInstance& inst) {
  nlohmann::ordered_json j;
  j["instance_id"] = inst.instance_id;
  j["task_id"] = inst.task_id;
  j["seed"] = inst.seed;
  j["question"] = inst.question;
  j["ground_truth"] = answer_to_json(inst.ground_truth);
  j["image_path"] = inst.image_path;
  j["svg_path"] = inst.svg_path;
  j["params"] = inst.params;
  return j;
}

inline TaskInstance instance_from_json(const nlohmann::json& j) {
  TaskInstance inst;
  inst.instance_id = j.at("instance_id").get<std::string>();
  inst.task_id = j.at("task_id").get<int>();
  inst.seed = j.at("seed").get<uint64_t>();
  inst.question = j.at("question").get<std::string>();
  inst.ground_truth = answer_from_json(j.at("ground_truth"));
  inst.image_path = j.at("image_path").get<std::string>();
  inst.svg_path = j.at("svg_path").get<std::string>();
  inst.params = j.at("params");
  return inst;
}

inline std::vector<TaskInstance> load_manifest(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::vector<TaskInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(instance_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

// Writes PNG + SVG per instance plus manifest.jsonl and dataset_meta.json.
// Instance generation is embarrassingly parallel; files are written per
// instance, the manifest serially in (task_id, index) order.
inline std::vector<TaskInstance> generate_dataset(
    const GeneratorConfig& cfg, const std::filesystem::path& out_dir,
    int jobs = 1) {
  namespace fs = std::filesystem;
  if (cfg.instances_per_task < 1)
    throw std::invalid_argument("instances_per_task must be >= 1");
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "svg");

  std::vector<int> tasks = cfg.tasks;
  std::sort(tasks.begin(), tasks.end());
  struct Job {
    int task_id;
    int index;
  };
  std::vector<Job> job_list;
  for (int t : tasks)
    for (int i = 0; i < cfg.instances_per_task; ++i) job_list.push_back({t, i});

  std::vector<TaskInstance> manifest(job_list.size());
  std::vector<std::string> errors(job_list.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t j = next.fetch_add(1); j < job_list.size();
         j = next.fetch_add(1)) {
      try {
        GeneratedInstance gen =
            generate_instance(cfg, job_list[j].task_id, job_list[j].index);
        detail::write_file(out_dir / gen.meta.svg_path, scene_to_svg(gen.scene));
        detail::write_file(out_dir / gen.meta.image_path, rasterize(gen.scene));
        manifest[j] = std::move(gen.meta);
      } catch (const std::exception& e) {
        errors[j] = std::string(e.what());
      }
    }
  };
  int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::string failures;
  for (size_t j = 0; j < job_list.size(); ++j) {
    if (!errors[j].empty())
      failures += instance_name(job_list[j].task_id, job_list[j].index) + ": " +
                  errors[j] + "\n";
  }
  if (!failures.empty())
    throw GenerationError("dataset generation failed:\n" + failures);

  std::string lines;
  for (const TaskInstance& inst : manifest)
    lines += instance_to_json(inst).dump() + "\n";
  detail::write_file(out_dir / "manifest.jsonl", lines);

  nlohmann::ordered_json meta;
  meta["master_seed"] = cfg.master_seed;
  meta["config"] = cfg.echo();
  meta["generator_version"] = std::string("geoprobe-") + kVersion;
  meta["font_checksum"] = font_checksum();
  detail::write_file(out_dir / "dataset_meta.json", meta.dump(2) + "\n");
  return manifest;
}

struct VerifyReport {
  int checked = 0;
  std::vector<std::string> mismatches;

  bool ok() const { return checked > 0 && mismatches.empty(); }
};

// Re-derives every ground truth from the stored SVG scene and compares it
// with the manifest.
inline VerifyReport verify_dataset(const std::filesystem::path& dataset_dir) {
  VerifyReport report;
  std::vector<TaskInstance> manifest =
      load_manifest(dataset_dir / "manifest.jsonl");
  if (manifest.empty()) {
    report.mismatches.push_back("manifest is empty");
    return report;
  }
  for (const TaskInstance& inst : manifest) {
    ++report.checked;
    try {
      Scene scene =
          scene_from_svg(detail::read_text_file(dataset_dir / inst.svg_path));
      AnswerValue recomputed = recompute_truth(inst.task_id, scene);
      if (!(recomputed == inst.ground_truth)) {
        report.mismatches.push_back(
            inst.instance_id + ": stored " +
            answer_to_json(inst.ground_truth).dump() + " recomputed " +
            answer_to_json(recomputed).dump());
      }
    } catch (const std::exception& e) {
      report.mismatches.push_back(inst.instance_id + ": " + e.what());
    }
  }
  return report;
}

}  // namespace geoprobe
