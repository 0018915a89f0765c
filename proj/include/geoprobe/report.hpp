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
// Scoring, the accuracy grid (tasks as QnA / QnA+Captions column pairs with
// a trailing average), exact McNemar tests on paired modes, and report
// rendering to markdown, JSON and CSV. Parse failures score as incorrect
// and are reported separately; dropping them would inflate accuracy.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoprobe/generators.hpp"
#include "geoprobe/pipeline.hpp"

namespace geoprobe {

struct ScoredTrace {
  PipelineTrace trace;
  bool correct = false;
};

// Exact-match scoring; stage errors and parse failures are incorrect.
inline std::vector<ScoredTrace> score(const std::vector<TaskInstance>& manifest,
                                      const std::vector<PipelineTrace>& traces) {
  std::map<std::string, const TaskInstance*> by_id;
  for (const TaskInstance& inst : manifest) by_id[inst.instance_id] = &inst;
  std::vector<ScoredTrace> out;
  out.reserve(traces.size());
  for (const PipelineTrace& t : traces) {
    auto it = by_id.find(t.instance_id);
    if (it == by_id.end())
      throw Error("score: trace references unknown instance '" +
                  t.instance_id + "'");
    bool correct = false;
    if (!t.error) {
      if (const Parsed* p = std::get_if<Parsed>(&t.parsed))
        correct = p->value == it->second->ground_truth;
    }
    out.push_back({t, correct});
  }
  return out;
}

// Round half-up to two decimals (the convention the published grid uses:
// 39.625 -> 39.63).
inline double round_half_up2(double v) {
  return std::floor(v * 100.0 + 0.5) / 100.0;
}

// Unweighted mean of per-task accuracies, rounded half-up to 2 decimals.
inline double average_of_accuracies(const std::vector<double>& accuracies) {
  if (accuracies.empty())
    throw std::invalid_argument("average_of_accuracies: empty input");
  double sum = 0;
  for (double a : accuracies) sum += a;
  return round_half_up2(sum / static_cast<double>(accuracies.size()));
}

struct EvalCell {
  int n = 0;
  int correct = 0;
  int parse_failures = 0;
  double accuracy = 0;  // percent
};

struct EvalRow {
  std::string model;
  // task id -> mode ("direct"/"captioned") -> cell
  std::map<int, std::map<std::string, EvalCell>> tasks;
  std::map<std::string, double> average;          // mode -> rounded percent
  std::map<std::string, double> parse_fail_rate;  // mode -> percent
};

struct EvalTable {
  std::vector<EvalRow> rows;
};

// Builds one grid row from scored traces of a single model run.
inline EvalRow aggregate(const std::vector<ScoredTrace>& scored,
                         const std::string& model_label) {
  if (scored.empty()) throw std::invalid_argument("aggregate: empty input");
  EvalRow row;
  row.model = model_label;
  std::map<std::string, std::pair<int, int>> fail_totals;  // mode -> {fails, n}
  for (const ScoredTrace& s : scored) {
    EvalCell& cell = row.tasks[s.trace.task_id][s.trace.mode];
    cell.n += 1;
    if (s.correct) cell.correct += 1;
    bool parse_failed = !std::holds_alternative<Parsed>(s.trace.parsed);
    if (parse_failed) cell.parse_failures += 1;
    auto& ft = fail_totals[s.trace.mode];
    ft.first += parse_failed ? 1 : 0;
    ft.second += 1;
  }
  std::map<std::string, std::vector<double>> per_mode;
  for (auto& [task_id, modes] : row.tasks) {
    for (auto& [mode, cell] : modes) {
      cell.accuracy = 100.0 * cell.correct / cell.n;
      per_mode[mode].push_back(cell.accuracy);
    }
  }
  for (const auto& [mode, accs] : per_mode)
    row.average[mode] = average_of_accuracies(accs);
  for (const auto& [mode, ft] : fail_totals)
    row.parse_fail_rate[mode] =
        round_half_up2(100.0 * ft.first / std::max(1, ft.second));
  return row;
}

// --- McNemar ---------------------------------------------------------------------

// Exact two-sided binomial test on discordant pairs:
// p = min(1, 2 * sum_{k=0..min(b,c)} C(b+c, k) * 0.5^(b+c)); p(0,0) = 1.
inline double mcnemar_exact(int b, int c) {
  if (b < 0 || c < 0)
    throw std::invalid_argument("mcnemar_exact: negative count");
  const int n = b + c;
  if (n == 0) return 1.0;
  const int k = std::min(b, c);
  long double term = std::pow(0.5L, n);  // C(n,0) * 0.5^n
  long double sum = term;
  for (int i = 1; i <= k; ++i) {
    term *= static_cast<long double>(n - i + 1) / static_cast<long double>(i);
    sum += term;
  }
  long double p = 2.0L * sum;
  return static_cast<double>(p > 1.0L ? 1.0L : p);
}

enum class Direction { captioned_better, direct_better, tie };

inline const char* direction_name(Direction d) {
  switch (d) {
    case Direction::captioned_better: return "captioned_better";
    case Direction::direct_better: return "direct_better";
    case Direction::tie: return "tie";
  }
  return "tie";
}

struct PairedComparison {
  std::string task;  // "1".."8" or "all"
  int n = 0;         // paired instances
  int b = 0;         // direct correct, captioned wrong
  int c = 0;         // direct wrong, captioned correct
  double p_value = 1.0;
  Direction direction = Direction::tie;
};

// Pairs traces by instance id and reports per-task + overall discordance.
// Requires both modes over the same instance set.
inline std::vector<PairedComparison> compare_modes(
    const std::vector<ScoredTrace>& scored) {
  struct Pair {
    int task_id = 0;
    std::optional<bool> direct, captioned;
  };
  std::map<std::string, Pair> pairs;
  for (const ScoredTrace& s : scored) {
    Pair& p = pairs[s.trace.instance_id];
    p.task_id = s.trace.task_id;
    if (s.trace.mode == "direct") {
      if (p.direct) throw Error("compare_modes: duplicate direct trace");
      p.direct = s.correct;
    } else if (s.trace.mode == "captioned") {
      if (p.captioned) throw Error("compare_modes: duplicate captioned trace");
      p.captioned = s.correct;
    }
  }
  for (const auto& [id, p] : pairs) {
    if (!p.direct || !p.captioned)
      throw Error("compare_modes: instance '" + id +
                  "' lacks one of the two modes");
  }

  auto build = [&](const std::string& label, auto&& filter) {
    PairedComparison out;
    out.task = label;
    for (const auto& [id, p] : pairs) {
      if (!filter(p.task_id)) continue;
      out.n += 1;
      if (*p.direct && !*p.captioned) out.b += 1;
      if (!*p.direct && *p.captioned) out.c += 1;
    }
    out.p_value = mcnemar_exact(out.b, out.c);
    out.direction = out.c > out.b   ? Direction::captioned_better
                    : out.b > out.c ? Direction::direct_better
                                    : Direction::tie;
    return out;
  };

  std::vector<PairedComparison> result;
  for (int task = 1; task <= 8; ++task)
    result.push_back(build(std::to_string(task),
                           [task](int t) { return t == task; }));
  result.push_back(build("all", [](int) { return true; }));
  return result;
}

// --- Rendering --------------------------------------------------------------------

enum class ReportFormat { markdown, json, csv };

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string fmt_p(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline const std::array<const char*, 2> kModeOrder = {"direct", "captioned"};
inline const char* mode_title(const std::string& mode) {
  return mode == "direct" ? "QnA" : "QnA+Captions";
}

}  // namespace detail

inline nlohmann::ordered_json eval_table_to_json(const EvalTable& table) {
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const EvalRow& row : table.rows) {
    nlohmann::ordered_json tasks;
    for (const auto& [task_id, modes] : row.tasks) {
      nlohmann::ordered_json cells;
      for (const char* mode : detail::kModeOrder) {
        auto it = modes.find(mode);
        if (it == modes.end()) continue;
        cells[mode] = {{"n", it->second.n},
                       {"correct", it->second.correct},
                       {"parse_failures", it->second.parse_failures},
                       {"accuracy", it->second.accuracy}};
      }
      tasks[std::to_string(task_id)] = cells;
    }
    nlohmann::ordered_json j;
    j["model"] = row.model;
    j["tasks"] = tasks;
    j["average"] = row.average;
    j["parse_fail_rate"] = row.parse_fail_rate;
    models.push_back(j);
  }
  return models;
}

inline EvalTable eval_table_from_json(const nlohmann::json& models) {
  EvalTable table;
  for (const auto& j : models) {
    EvalRow row;
    row.model = j.at("model").get<std::string>();
    for (const auto& [task_str, cells] : j.at("tasks").items()) {
      for (const auto& [mode, cell] : cells.items()) {
        EvalCell c;
        c.n = cell.at("n").get<int>();
        c.correct = cell.at("correct").get<int>();
        c.parse_failures = cell.at("parse_failures").get<int>();
        c.accuracy = cell.at("accuracy").get<double>();
        row.tasks[std::stoi(task_str)][mode] = c;
      }
    }
    row.average = j.at("average").get<std::map<std::string, double>>();
    row.parse_fail_rate =
        j.at("parse_fail_rate").get<std::map<std::string, double>>();
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline nlohmann::ordered_json comparisons_to_json(
    const std::vector<PairedComparison>& comparisons) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const PairedComparison& c : comparisons) {
    arr.push_back({{"task", c.task},
                   {"n", c.n},
                   {"b", c.b},
                   {"c", c.c},
                   {"p_value", c.p_value},
                   {"direction", direction_name(c.direction)}});
  }
  return arr;
}

// Renders the grid plus significance. Markdown mirrors the published
// layout: per-task QnA / QnA+Captions column pairs, average last, the
// better average of each row marked; with several rows the best value per
// task column is marked too.
inline std::string render_report(
    const EvalTable& table,
    const std::map<std::string, std::vector<PairedComparison>>& significance,
    ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json j;
    j["models"] = eval_table_to_json(table);
    nlohmann::ordered_json sig;
    for (const auto& [model, comparisons] : significance)
      sig[model] = comparisons_to_json(comparisons);
    j["significance"] = sig;
    return j.dump(2) + "\n";
  }

  if (format == ReportFormat::csv) {
    std::string out = "model,task,mode,n,correct,accuracy,parse_failures\n";
    for (const EvalRow& row : table.rows) {
      for (const auto& [task_id, modes] : row.tasks) {
        for (const char* mode : detail::kModeOrder) {
          auto it = modes.find(mode);
          if (it == modes.end()) continue;
          out += row.model + "," + std::to_string(task_id) + "," + mode + "," +
                 std::to_string(it->second.n) + "," +
                 std::to_string(it->second.correct) + "," +
                 detail::fmt2(it->second.accuracy) + "," +
                 std::to_string(it->second.parse_failures) + "\n";
        }
      }
      for (const char* mode : detail::kModeOrder) {
        auto it = row.average.find(mode);
        if (it == row.average.end()) continue;
        out += row.model + ",average," + mode + ",,," +
               detail::fmt2(it->second) + ",\n";
      }
    }
    return out;
  }

  // Markdown.
  std::vector<int> task_ids;
  for (const EvalRow& row : table.rows)
    for (const auto& [task_id, modes] : row.tasks)
      if (std::find(task_ids.begin(), task_ids.end(), task_id) ==
          task_ids.end())
        task_ids.push_back(task_id);
  std::sort(task_ids.begin(), task_ids.end());

  // Best value per (task, mode) column, for multi-row tables.
  std::map<std::string, double> col_best;
  for (const EvalRow& row : table.rows) {
    for (const auto& [task_id, modes] : row.tasks) {
      for (const auto& [mode, cell] : modes) {
        std::string key = std::to_string(task_id) + ":" + mode;
        auto it = col_best.find(key);
        if (it == col_best.end() || cell.accuracy > it->second)
          col_best[key] = cell.accuracy;
      }
    }
  }

  std::string out = "# Accuracy grid\n\n| Model |";
  for (int t : task_ids) {
    out += " Task " + std::to_string(t) + " QnA | Task " + std::to_string(t) +
           " QnA+Captions |";
  }
  out += " Average QnA | Average QnA+Captions |\n|---|";
  for (size_t i = 0; i < task_ids.size() * 2 + 2; ++i) out += "---:|";
  out += "\n";

  for (const EvalRow& row : table.rows) {
    out += "| " + row.model + " |";
    for (int t : task_ids) {
      for (const char* mode : detail::kModeOrder) {
        auto task_it = row.tasks.find(t);
        if (task_it == row.tasks.end() || !task_it->second.count(mode)) {
          out += " - |";
          continue;
        }
        const EvalCell& cell = task_it->second.at(mode);
        std::string text = detail::fmt2(cell.accuracy);
        std::string key = std::to_string(t) + ":" + mode;
        if (table.rows.size() > 1 && cell.accuracy == col_best[key])
          text = "**" + text + "**";
        out += " " + text + " |";
      }
    }
    auto direct_avg = row.average.find("direct");
    auto capt_avg = row.average.find("captioned");
    bool both = direct_avg != row.average.end() && capt_avg != row.average.end();
    for (const char* mode : detail::kModeOrder) {
      auto it = row.average.find(mode);
      if (it == row.average.end()) {
        out += " - |";
        continue;
      }
      std::string text = detail::fmt2(it->second);
      if (both) {
        bool best = (mode == std::string("captioned"))
                        ? capt_avg->second >= direct_avg->second
                        : direct_avg->second > capt_avg->second;
        if (best) text = "**" + text + "**";
      }
      out += " " + text + " |";
    }
    out += "\n";
  }

  bool any_fail_rates = false;
  for (const EvalRow& row : table.rows)
    if (!row.parse_fail_rate.empty()) any_fail_rates = true;
  if (any_fail_rates) {
    out += "\n## Parse failures\n\n| Model | Mode | Rate % |\n|---|---|---:|\n";
    for (const EvalRow& row : table.rows) {
      for (const char* mode : detail::kModeOrder) {
        auto it = row.parse_fail_rate.find(mode);
        if (it == row.parse_fail_rate.end()) continue;
        out += "| " + row.model + " | " + detail::mode_title(mode) + " | " +
               detail::fmt2(it->second) + " |\n";
      }
    }
  }

  if (!significance.empty()) {
    out += "\n## Significance (exact McNemar, two-sided)\n";
    for (const auto& [model, comparisons] : significance) {
      out += "\n### " + model +
             "\n\n| Task | n | b (QnA only correct) | c (QnA+Captions only "
             "correct) | p-value | Direction |\n|---|---:|---:|---:|---:|---|\n";
      for (const PairedComparison& c : comparisons) {
        out += "| " + c.task + " | " + std::to_string(c.n) + " | " +
               std::to_string(c.b) + " | " + std::to_string(c.c) + " | " +
               detail::fmt_p(c.p_value) + " | " + direction_name(c.direction) +
               " |\n";
      }
    }
  }
  return out;
}

}  // namespace geoprobe
