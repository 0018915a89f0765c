// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#include "geoprobe/generators.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

namespace geoprobe {
namespace {

namespace fs = std::filesystem;

GeneratorConfig small_config(uint64_t seed) {
  GeneratorConfig cfg;
  cfg.master_seed = seed;
  cfg.instances_per_task = 2;
  return cfg;
}

TEST(Palette, ContrastAgainstWhite) {
  for (Color c : task_palette())
    EXPECT_GE(255.0 - c.luminance(), 100.0) << c.hex();
}

TEST(WordList, PinnedShape) {
  std::set<std::string> seen;
  for (const char* w : kWordList) {
    std::string word(w);
    EXPECT_GE(word.size(), 5u) << word;
    EXPECT_LE(word.size(), 10u) << word;
    for (char ch : word) EXPECT_TRUE(ch >= 'a' && ch <= 'z') << word;
    seen.insert(word);
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST(Generators, DeterministicScenes) {
  GeneratorConfig cfg = small_config(42);
  for (int task = 1; task <= 8; ++task) {
    GeneratedInstance a = generate_instance(cfg, task, 1);
    GeneratedInstance b = generate_instance(cfg, task, 1);
    EXPECT_EQ(scene_to_svg(a.scene), scene_to_svg(b.scene)) << "task " << task;
    EXPECT_EQ(instance_to_json(a.meta).dump(), instance_to_json(b.meta).dump());
    GeneratedInstance c = generate_instance(cfg, task, 2);
    EXPECT_NE(scene_to_svg(a.scene), scene_to_svg(c.scene)) << "task " << task;
  }
}

TEST(Generators, OracleClosureOverSvg) {
  GeneratorConfig cfg = small_config(7);
  cfg.instances_per_task = 5;
  for (int task = 1; task <= 8; ++task) {
    for (int index = 0; index < 5; ++index) {
      GeneratedInstance g = generate_instance(cfg, task, index);
      Scene parsed = scene_from_svg(scene_to_svg(g.scene));
      AnswerValue recomputed = recompute_truth(task, parsed);
      EXPECT_TRUE(recomputed == g.meta.ground_truth)
          << g.meta.instance_id << " stored "
          << answer_to_json(g.meta.ground_truth).dump() << " recomputed "
          << answer_to_json(recomputed).dump();
    }
  }
}

TEST(Task1, TargetsMatchBruteForceRecount) {
  GeneratorConfig cfg = small_config(11);
  for (int index = 0; index < 30; ++index) {
    GeneratedInstance g = generate_instance(cfg, 1, index);
    const auto& e1 = std::get<ScenePolyline>(g.scene.elements[0].shape);
    const auto& e2 = std::get<ScenePolyline>(g.scene.elements[1].shape);
    // Brute-force pairwise recount, deduplicated.
    std::vector<Point> hits;
    for (size_t i = 0; i + 1 < e1.points.size(); ++i) {
      for (size_t j = 0; j + 1 < e2.points.size(); ++j) {
        Segment s1(e1.points[i], e1.points[i + 1]);
        Segment s2(e2.points[j], e2.points[j + 1]);
        if (auto p = segment_intersection(s1, s2)) {
          bool dup = false;
          for (Point h : hits)
            if (distance(h, *p) < 1e-9) dup = true;
          if (!dup) hits.push_back(*p);
        }
      }
    }
    int expected = g.meta.params.at("crossings").get<int>();
    EXPECT_EQ(static_cast<int>(hits.size()), expected);
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(Count(expected)));
  }
}

TEST(Task1, CrossingTargetsCoverRangeInEveryWindow) {
  GeneratorConfig cfg = small_config(13);
  std::vector<int> targets;
  for (int index = 0; index < 150; ++index)
    targets.push_back(
        generate_instance(cfg, 1, index).meta.params.at("crossings").get<int>());
  for (int start = 0; start + 50 <= 150; start += 25) {
    std::set<int> seen(targets.begin() + start, targets.begin() + start + 50);
    EXPECT_EQ(seen, (std::set<int>{0, 1, 2})) << "window at " << start;
  }
}

TEST(Task2, ParityScheduleGivesExactBalance) {
  GeneratorConfig cfg = small_config(17);
  int yes = 0;
  for (int index = 0; index < 500; ++index) {
    GeneratedInstance g = generate_instance(cfg, 2, index);
    const auto& s1 = std::get<ScenePolyline>(g.scene.elements[0].shape);
    const auto& s2 = std::get<ScenePolyline>(g.scene.elements[1].shape);
    Segment a(s1.points[0], s1.points[1]), b(s2.points[0], s2.points[1]);
    bool hit = segment_intersection(a, b).has_value();
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(YesNo(hit)));
    if (hit) ++yes;
    if (!hit) EXPECT_GE(segment_segment_distance(a, b), 10.0);
  }
  EXPECT_EQ(yes, 250);
}

TEST(Task3, NestingPredicateHoldsAndSeedIsStable) {
  GeneratorConfig cfg = small_config(19);
  bool saw_five = false;
  for (int index = 0; index < 12; ++index) {
    GeneratedInstance g = generate_instance(cfg, 3, index);
    std::vector<Square> squares;
    for (const SceneElement& e : g.scene.elements) {
      const auto& s = std::get<SceneSquare>(e.shape);
      squares.emplace_back(s.center, s.half_size, s.rotation);
    }
    int n = g.meta.params.at("squares").get<int>();
    EXPECT_EQ(static_cast<int>(squares.size()), n);
    EXPECT_TRUE(squares_strictly_nested(squares, 8));
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(Count(n)));
    if (n == 5) saw_five = true;

    GeneratedInstance again = generate_instance(cfg, 3, index);
    EXPECT_EQ(again.meta.params.at("squares").get<int>(), n);
  }
  EXPECT_TRUE(saw_five);
}

TEST(Task4, OverlapPatternAndCanvasFit) {
  GeneratorConfig cfg = small_config(23);
  std::set<int> ns;
  for (int index = 0; index < 24; ++index) {
    GeneratedInstance g = generate_instance(cfg, 4, index);
    std::vector<Circle> rings;
    double stroke = 0;
    for (const SceneElement& e : g.scene.elements) {
      const auto& c = std::get<SceneCircle>(e.shape);
      rings.emplace_back(c.center, c.radius);
      stroke = e.style.stroke_width;
      EXPECT_GE(c.center.x - c.radius, 20.0 - 1e-9);
      EXPECT_LE(c.center.x + c.radius, 512.0 - 20.0 + 1e-9);
      EXPECT_GE(c.center.y - c.radius, 20.0 - 1e-9);
      EXPECT_LE(c.center.y + c.radius, 512.0 - 20.0 + 1e-9);
    }
    int n = static_cast<int>(rings.size());
    ns.insert(n);
    EXPECT_EQ(ring_overlap_count(rings), n - 1);
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(Count(n)));
    // Margin from tangency at least two stroke widths, every pair.
    for (size_t i = 0; i < rings.size(); ++i) {
      for (size_t j = i + 1; j < rings.size(); ++j) {
        double d = distance(rings[i].center(), rings[j].center());
        double sum = rings[i].radius() + rings[j].radius();
        EXPECT_GE(std::abs(d - sum), 2 * stroke);
      }
    }
  }
  EXPECT_EQ(ns, (std::set<int>{4, 5, 6, 7, 8, 9}));
}

TEST(Task5, CircledLetterConstruction) {
  GeneratorConfig cfg = small_config(29);
  for (int index = 0; index < 50; ++index) {
    GeneratedInstance g = generate_instance(cfg, 5, index);
    std::string word = g.meta.params.at("word").get<std::string>();
    int idx = g.meta.params.at("index").get<int>();
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(Letter(word[idx])));

    const auto& run = std::get<GlyphRun>(g.scene.elements[0].shape);
    const auto& mark = std::get<AnnotationEllipse>(g.scene.elements[1].shape);
    Rect box = glyph_box(run.text, idx, run.origin, run.font_size);
    EXPECT_NEAR(mark.center.x, box.center().x, 1e-9);
    EXPECT_NEAR(mark.rx, 1.3 * box.w / 2, 1e-9);
    // The ellipse may reach at most 25% of a neighbor glyph box's width.
    double spill = mark.rx - box.w / 2;
    EXPECT_LE(spill, 0.25 * box.w);
  }
}

TEST(Task6, EdgeDisjointPathsAndRecount) {
  GeneratorConfig cfg = small_config(31);
  for (int index = 0; index < 16; ++index) {
    GeneratedInstance g = generate_instance(cfg, 6, index);
    int expected = g.meta.params.at("paths").get<int>();
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(Count(expected)));
    EXPECT_TRUE(recompute_truth(6, g.scene) == g.meta.ground_truth);

    // No two drawn paths may share an edge.
    std::set<std::pair<std::string, std::string>> edges;
    for (const SceneElement& e : g.scene.elements) {
      const auto* p = std::get_if<ScenePolyline>(&e.shape);
      if (!p || e.style.stroke_width < kPathStrokeWidth - 0.5) continue;
      if (e.style.stroke == kGridGray) continue;
      for (size_t i = 0; i + 1 < p->points.size(); ++i) {
        char a[32], b[32];
        std::snprintf(a, sizeof(a), "%.1f,%.1f", p->points[i].x, p->points[i].y);
        std::snprintf(b, sizeof(b), "%.1f,%.1f", p->points[i + 1].x,
                      p->points[i + 1].y);
        std::string ka(a), kb(b);
        if (kb < ka) std::swap(ka, kb);
        EXPECT_TRUE(edges.insert({ka, kb}).second)
            << "shared edge in " << g.meta.instance_id;
      }
    }
  }
}

TEST(Task7, ScanlineOverSvgMatches) {
  GeneratorConfig cfg = small_config(37);
  for (int index = 0; index < 16; ++index) {
    GeneratedInstance g = generate_instance(cfg, 7, index);
    Scene parsed = scene_from_svg(scene_to_svg(g.scene));
    EXPECT_TRUE(recompute_truth(7, parsed) == g.meta.ground_truth);
    GeneratedInstance again = generate_instance(cfg, 7, index);
    EXPECT_EQ(g.meta.params.dump(), again.meta.params.dump());
  }
}

TEST(Task8, TangencyMarginsOverFiveHundredInstances) {
  GeneratorConfig cfg = small_config(41);
  const double stroke = 4.0;
  int yes = 0;
  for (int index = 0; index < 500; ++index) {
    GeneratedInstance g = generate_instance(cfg, 8, index);
    const auto& c1 = std::get<SceneCircle>(g.scene.elements[0].shape);
    const auto& c2 = std::get<SceneCircle>(g.scene.elements[1].shape);
    double d = distance(c1.center, c2.center);
    double sum = c1.radius + c2.radius;
    double diff = std::abs(c1.radius - c2.radius);
    EXPECT_GE(std::abs(d - sum), 2 * stroke);
    EXPECT_GE(std::abs(d - diff), 2 * stroke);
    bool hit = circles_intersect(Circle(c1.center, c1.radius),
                                 Circle(c2.center, c2.radius));
    EXPECT_TRUE(g.meta.ground_truth == AnswerValue(YesNo(hit)));
    if (hit) ++yes;
  }
  EXPECT_EQ(yes, 250);
}

class DatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("geoprobe_ds_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(DatasetTest, WriteVerifyRegenerate) {
  GeneratorConfig cfg = small_config(1729);
  std::vector<TaskInstance> manifest = generate_dataset(cfg, dir_);
  EXPECT_EQ(manifest.size(), 16u);
  EXPECT_TRUE(fs::exists(dir_ / "images/t1_0000.png"));
  EXPECT_TRUE(fs::exists(dir_ / "svg/t8_0001.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "dataset_meta.json"));

  // Manifest on disk: 16 lines in (task, index) order.
  std::vector<TaskInstance> loaded = load_manifest(dir_ / "manifest.jsonl");
  ASSERT_EQ(loaded.size(), 16u);
  for (size_t i = 1; i < loaded.size(); ++i) {
    EXPECT_LE(loaded[i - 1].task_id, loaded[i].task_id);
  }
  EXPECT_EQ(loaded[0].instance_id, "t1_0000");

  VerifyReport report = verify_dataset(dir_);
  EXPECT_EQ(report.checked, 16);
  EXPECT_TRUE(report.ok()) << (report.mismatches.empty()
                                   ? ""
                                   : report.mismatches.front());

  // Regeneration into a second directory is byte-identical, even when
  // generated with a thread pool.
  fs::path dir2 = dir_;
  dir2 += "_again";
  generate_dataset(cfg, dir2, /*jobs=*/4);
  auto bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  EXPECT_EQ(bytes(dir_ / "manifest.jsonl"), bytes(dir2 / "manifest.jsonl"));
  for (const TaskInstance& inst : loaded)
    EXPECT_EQ(bytes(dir_ / inst.svg_path), bytes(dir2 / inst.svg_path))
        << inst.instance_id;
  fs::remove_all(dir2);
}

TEST_F(DatasetTest, TamperedManifestFailsVerification) {
  GeneratorConfig cfg = small_config(97);
  cfg.tasks = {1, 7};
  generate_dataset(cfg, dir_);
  std::vector<TaskInstance> manifest = load_manifest(dir_ / "manifest.jsonl");
  manifest[0].ground_truth = Count(19);
  std::string lines;
  for (const TaskInstance& inst : manifest)
    lines += instance_to_json(inst).dump() + "\n";
  std::ofstream(dir_ / "manifest.jsonl") << lines;

  VerifyReport report = verify_dataset(dir_);
  EXPECT_FALSE(report.ok());
  ASSERT_EQ(report.mismatches.size(), 1u);
  EXPECT_NE(report.mismatches[0].find("t1_0000"), std::string::npos);
}

TEST_F(DatasetTest, TaskSubsetRespected) {
  GeneratorConfig cfg = small_config(5);
  cfg.tasks = {2, 8};
  cfg.instances_per_task = 3;
  std::vector<TaskInstance> manifest = generate_dataset(cfg, dir_);
  EXPECT_EQ(manifest.size(), 6u);
  for (const TaskInstance& inst : manifest)
    EXPECT_TRUE(inst.task_id == 2 || inst.task_id == 8);
}

}  // namespace
}  // namespace geoprobe
