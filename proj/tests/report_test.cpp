// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#include "geoprobe/report.hpp"

#include <gtest/gtest.h>

#include <fstream>

namespace geoprobe {
namespace {

TaskInstance make_instance(const std::string& id, int task,
                           AnswerValue truth) {
  TaskInstance inst;
  inst.instance_id = id;
  inst.task_id = task;
  inst.question = question_for_task(task);
  inst.ground_truth = truth;
  return inst;
}

PipelineTrace make_trace(const std::string& id, int task,
                         const std::string& mode, ParseOutcome parsed) {
  PipelineTrace t;
  t.instance_id = id;
  t.task_id = task;
  t.mode = mode;
  t.parsed = std::move(parsed);
  return t;
}

TEST(Score, ExactMatchRules) {
  std::vector<TaskInstance> manifest = {
      make_instance("a", 1, Count(3)),
      make_instance("b", 7, GridDims(4, 7)),
      make_instance("c", 2, YesNo(true)),
  };
  std::vector<PipelineTrace> traces = {
      make_trace("a", 1, "direct", Parsed{Count(3)}),
      make_trace("b", 7, "direct", Parsed{GridDims(7, 4)}),  // swapped: wrong
      make_trace("c", 2, "direct", NoAnswerFound{"nothing"}),
  };
  std::vector<ScoredTrace> scored = score(manifest, traces);
  EXPECT_TRUE(scored[0].correct);
  EXPECT_FALSE(scored[1].correct);
  EXPECT_FALSE(scored[2].correct);

  // A stage error scores incorrect even if parsing accidentally succeeded.
  PipelineTrace errored = make_trace("a", 1, "direct", Parsed{Count(3)});
  errored.error = StageError{"direct", "exhausted_retries", "boom"};
  EXPECT_FALSE(score(manifest, {errored})[0].correct);
}

TEST(Score, UnknownInstanceIsFatal) {
  std::vector<TaskInstance> manifest = {make_instance("a", 1, Count(3))};
  EXPECT_THROW(
      score(manifest, {make_trace("ghost", 1, "direct", Parsed{Count(3)})}),
      Error);
}

// The published grid's six row averages, reproduced from the per-task
// accuracies by unweighted mean + half-up rounding.
TEST(Aggregate, PublishedRowAverages) {
  EXPECT_NEAR(average_of_accuracies({40, 78, 49, 24, 33, 15, 13, 65}), 39.63,
              0.005);
  EXPECT_NEAR(average_of_accuracies({43, 88, 51, 26, 41, 14, 15, 74}), 44.00,
              0.005);
  EXPECT_NEAR(average_of_accuracies({3, 90, 60, 21, 3, 0, 6, 37.5}), 27.56,
              0.005);
  EXPECT_NEAR(average_of_accuracies({49, 84, 40, 34, 34, 24, 6, 55}), 40.75,
              0.005);
  EXPECT_NEAR(average_of_accuracies({46, 58, 18, 39, 40, 22, 48, 80}), 43.88,
              0.005);
  EXPECT_NEAR(average_of_accuracies({71, 96, 41, 46, 56, 21, 54, 79}), 58.00,
              0.005);
}

std::vector<ScoredTrace> synthetic_scored() {
  // 8 tasks x 2 instances x 2 modes; direct correct on index 0 only,
  // captioned correct on both.
  std::vector<TaskInstance> manifest;
  std::vector<PipelineTrace> traces;
  for (int task = 1; task <= 8; ++task) {
    for (int index = 0; index < 2; ++index) {
      std::string id = instance_name(task, index);
      manifest.push_back(make_instance(id, task, Count(1)));
      traces.push_back(make_trace(id, task, "direct",
                                  Parsed{Count(index == 0 ? 1 : 2)}));
      traces.push_back(make_trace(id, task, "captioned", Parsed{Count(1)}));
    }
  }
  return score(manifest, traces);
}

TEST(Aggregate, GridFromScoredTraces) {
  EvalRow row = aggregate(synthetic_scored(), "demo");
  EXPECT_EQ(row.model, "demo");
  ASSERT_EQ(row.tasks.size(), 8u);
  for (const auto& [task_id, modes] : row.tasks) {
    EXPECT_DOUBLE_EQ(modes.at("direct").accuracy, 50.0);
    EXPECT_DOUBLE_EQ(modes.at("captioned").accuracy, 100.0);
    EXPECT_EQ(modes.at("direct").n, 2);
  }
  EXPECT_DOUBLE_EQ(row.average.at("direct"), 50.0);
  EXPECT_DOUBLE_EQ(row.average.at("captioned"), 100.0);
}

TEST(Aggregate, OrderIndependent) {
  std::vector<ScoredTrace> scored = synthetic_scored();
  EvalRow a = aggregate(scored, "m");
  std::reverse(scored.begin(), scored.end());
  EvalRow b = aggregate(scored, "m");
  EvalTable ta{{a}}, tb{{b}};
  EXPECT_EQ(eval_table_to_json(ta).dump(), eval_table_to_json(tb).dump());
}

TEST(McNemar, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(mcnemar_exact(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(mcnemar_exact(0, 5), 0.0625);       // 2 * 0.5^5
  EXPECT_DOUBLE_EQ(mcnemar_exact(1, 1), 1.0);          // 1.5 clipped
  EXPECT_DOUBLE_EQ(mcnemar_exact(2, 10), 158.0 / 4096.0);
}

TEST(McNemar, MatchesIndependentTable) {
  std::ifstream in(std::string(GEOPROBE_TESTDATA_DIR) + "/mcnemar_table.json");
  ASSERT_TRUE(in.good());
  nlohmann::json rows = nlohmann::json::parse(in);
  ASSERT_GE(rows.size(), 231u);  // all (b, c) with b + c <= 20
  for (const auto& row : rows) {
    int b = row.at("b").get<int>(), c = row.at("c").get<int>();
    EXPECT_NEAR(mcnemar_exact(b, c), row.at("p").get<double>(), 1e-12)
        << "b=" << b << " c=" << c;
  }
}

TEST(McNemar, SymmetryAndMonotonicityExhaustive) {
  for (int n = 0; n <= 30; ++n) {
    double prev = 2.0;
    for (int b = (n + 1) / 2; b <= n; ++b) {
      int c = n - b;
      double p = mcnemar_exact(b, c);
      EXPECT_DOUBLE_EQ(p, mcnemar_exact(c, b)) << b << "," << c;
      EXPECT_GT(p, 0.0);
      EXPECT_LE(p, 1.0);
      // With b + c fixed, p is non-increasing as |b - c| grows.
      EXPECT_LE(p, prev + 1e-15) << b << "," << c;
      prev = p;
    }
  }
}

TEST(CompareModes, SyntheticDiscordance) {
  // 20 paired instances on one task: b = 2, c = 10, 8 concordant.
  std::vector<TaskInstance> manifest;
  std::vector<PipelineTrace> traces;
  for (int i = 0; i < 20; ++i) {
    std::string id = instance_name(1, i);
    manifest.push_back(make_instance(id, 1, Count(1)));
    bool direct_ok = i < 2 || (i >= 12 && i < 16);   // 2 + 4
    bool capt_ok = (i >= 2 && i < 12) || (i >= 12 && i < 16);  // 10 + 4
    traces.push_back(make_trace(id, 1, "direct",
                                Parsed{Count(direct_ok ? 1 : 2)}));
    traces.push_back(make_trace(id, 1, "captioned",
                                Parsed{Count(capt_ok ? 1 : 2)}));
  }
  std::vector<PairedComparison> comparisons =
      compare_modes(score(manifest, traces));
  ASSERT_EQ(comparisons.size(), 9u);  // 8 tasks + overall
  const PairedComparison& t1 = comparisons[0];
  EXPECT_EQ(t1.task, "1");
  EXPECT_EQ(t1.n, 20);
  EXPECT_EQ(t1.b, 2);
  EXPECT_EQ(t1.c, 10);
  EXPECT_NEAR(t1.p_value, 158.0 / 4096.0, 1e-12);
  EXPECT_EQ(t1.direction, Direction::captioned_better);
  // Task with no data keeps p = 1, tie.
  EXPECT_EQ(comparisons[3].n, 0);
  EXPECT_DOUBLE_EQ(comparisons[3].p_value, 1.0);
  EXPECT_EQ(comparisons[8].task, "all");
  EXPECT_EQ(comparisons[8].b, 2);
  EXPECT_EQ(comparisons[8].c, 10);
}

TEST(CompareModes, AllConcordantMeansPOne) {
  std::vector<TaskInstance> manifest;
  std::vector<PipelineTrace> traces;
  for (int i = 0; i < 6; ++i) {
    std::string id = instance_name(2, i);
    manifest.push_back(make_instance(id, 2, YesNo(true)));
    traces.push_back(make_trace(id, 2, "direct", Parsed{YesNo(true)}));
    traces.push_back(make_trace(id, 2, "captioned", Parsed{YesNo(true)}));
  }
  for (const PairedComparison& c : compare_modes(score(manifest, traces))) {
    EXPECT_DOUBLE_EQ(c.p_value, 1.0);
    EXPECT_EQ(c.direction, Direction::tie);
  }
}

TEST(CompareModes, UnmatchedInstanceSetsAreFatal) {
  std::vector<TaskInstance> manifest = {make_instance("a", 1, Count(1))};
  std::vector<PipelineTrace> traces = {
      make_trace("a", 1, "direct", Parsed{Count(1)})};
  EXPECT_THROW(compare_modes(score(manifest, traces)), Error);
}

EvalRow published_row(const std::string& label,
                      const std::array<double, 8>& direct,
                      const std::array<double, 8>& captioned) {
  EvalRow row;
  row.model = label;
  std::vector<double> d(direct.begin(), direct.end());
  std::vector<double> c(captioned.begin(), captioned.end());
  for (int t = 1; t <= 8; ++t) {
    row.tasks[t]["direct"] = EvalCell{100, 0, 0, direct[t - 1]};
    row.tasks[t]["captioned"] = EvalCell{100, 0, 0, captioned[t - 1]};
  }
  row.average["direct"] = average_of_accuracies(d);
  row.average["captioned"] = average_of_accuracies(c);
  return row;
}

TEST(RenderReport, MarkdownGridReproducesPublishedAverages) {
  EvalTable table;
  table.rows.push_back(published_row("gemini-flash",
                                     {40, 78, 49, 24, 33, 15, 13, 65},
                                     {43, 88, 51, 26, 41, 14, 15, 74}));
  std::string md = render_report(table, {}, ReportFormat::markdown);
  EXPECT_NE(md.find("| Model |"), std::string::npos);
  EXPECT_NE(md.find("Task 8 QnA+Captions"), std::string::npos);
  EXPECT_NE(md.find("39.63"), std::string::npos);
  EXPECT_NE(md.find("**44.00**"), std::string::npos);  // better average marked
}

TEST(RenderReport, MultiRowMarksBestPerTaskColumn) {
  EvalTable table;
  table.rows.push_back(published_row("a", {40, 78, 49, 24, 33, 15, 13, 65},
                                     {43, 88, 51, 26, 41, 14, 15, 74}));
  table.rows.push_back(published_row("b", {46, 58, 18, 39, 40, 22, 48, 80},
                                     {71, 96, 41, 46, 56, 21, 54, 79}));
  std::string md = render_report(table, {}, ReportFormat::markdown);
  EXPECT_NE(md.find("**71.00**"), std::string::npos);  // task 1 best
  EXPECT_NE(md.find("**96.00**"), std::string::npos);  // task 2 best
}

TEST(RenderReport, JsonRoundTripsToEqualTable) {
  EvalRow row = aggregate(synthetic_scored(), "demo");
  row.parse_fail_rate["direct"] = 0.0;
  row.parse_fail_rate["captioned"] = 0.0;
  EvalTable table{{row}};
  std::string json_text = render_report(table, {}, ReportFormat::json);
  nlohmann::json parsed = nlohmann::json::parse(json_text);
  EvalTable back = eval_table_from_json(parsed.at("models"));
  EXPECT_EQ(eval_table_to_json(back).dump(), eval_table_to_json(table).dump());
}

TEST(RenderReport, CsvShape) {
  EvalTable table{{aggregate(synthetic_scored(), "demo")}};
  std::string csv = render_report(table, {}, ReportFormat::csv);
  EXPECT_EQ(csv.rfind("model,task,mode,n,correct,accuracy,parse_failures\n", 0),
            0u);
  // 8 tasks x 2 modes + 2 average rows + header.
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  EXPECT_EQ(lines, 1 + 16 + 2);
}

TEST(RenderReport, SignificanceSectionPresentOnlyWithComparisons) {
  EvalTable table{{aggregate(synthetic_scored(), "demo")}};
  std::map<std::string, std::vector<PairedComparison>> sig;
  sig["demo"] = compare_modes(synthetic_scored());
  std::string with = render_report(table, sig, ReportFormat::markdown);
  EXPECT_NE(with.find("## Significance"), std::string::npos);
  EXPECT_NE(with.find("| all |"), std::string::npos);
  std::string without = render_report(table, {}, ReportFormat::markdown);
  EXPECT_EQ(without.find("## Significance"), std::string::npos);
  EXPECT_EQ(render_report(table, sig, ReportFormat::markdown), with);
}

}  // namespace
}  // namespace geoprobe
