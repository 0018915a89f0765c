// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

namespace geoprobe {

// The four answer shapes the tasks produce. Construction validates the
// documented ranges so a malformed ground truth can never be stored.

struct Count {
  int value = 0;

  explicit Count(int v) : value(v) {
    if (v < 0 || v > 20)
      throw std::invalid_argument("Count: value must lie in [0, 20]");
  }
  friend bool operator==(Count a, Count b) { return a.value == b.value; }
};

struct YesNo {
  bool value = false;

  explicit YesNo(bool v) : value(v) {}
  friend bool operator==(YesNo a, YesNo b) { return a.value == b.value; }
};

struct Letter {
  char value = 'a';

  explicit Letter(char v) : value(v) {
    if (v < 'a' || v > 'z')
      throw std::invalid_argument("Letter: value must be a lowercase letter");
  }
  friend bool operator==(Letter a, Letter b) { return a.value == b.value; }
};

struct GridDims {
  int rows = 1;
  int cols = 1;

  GridDims(int r, int c) : rows(r), cols(c) {
    if (r < 1 || r > 20 || c < 1 || c > 20)
      throw std::invalid_argument("GridDims: components must lie in [1, 20]");
  }
  friend bool operator==(GridDims a, GridDims b) {
    return a.rows == b.rows && a.cols == b.cols;
  }
};

using AnswerValue = std::variant<Count, YesNo, Letter, GridDims>;

enum class AnswerKind { count, yes_no, letter, grid_dims };

inline AnswerKind answer_kind(const AnswerValue& v) {
  return static_cast<AnswerKind>(v.index());
}

inline std::string answer_kind_name(AnswerKind k) {
  switch (k) {
    case AnswerKind::count: return "count";
    case AnswerKind::yes_no: return "yes_no";
    case AnswerKind::letter: return "letter";
    case AnswerKind::grid_dims: return "grid_dims";
  }
  throw std::invalid_argument("answer_kind_name: bad kind");
}

// Fixed task -> answer shape mapping: 1,3,4,6 count; 2,8 yes/no; 5 letter;
// 7 grid dims.
inline AnswerKind answer_kind_for_task(int task_id) {
  switch (task_id) {
    case 1: case 3: case 4: case 6: return AnswerKind::count;
    case 2: case 8: return AnswerKind::yes_no;
    case 5: return AnswerKind::letter;
    case 7: return AnswerKind::grid_dims;
    default:
      throw std::invalid_argument("unknown task id " + std::to_string(task_id));
  }
}

// Shortest text that the matching parser maps back to the same value.
inline std::string canonical_text(const AnswerValue& v) {
  struct Visitor {
    std::string operator()(Count c) const { return std::to_string(c.value); }
    std::string operator()(YesNo y) const { return y.value ? "yes" : "no"; }
    std::string operator()(Letter l) const { return std::string(1, l.value); }
    std::string operator()(GridDims g) const {
      return std::to_string(g.rows) + "," + std::to_string(g.cols);
    }
  };
  return std::visit(Visitor{}, v);
}

inline nlohmann::ordered_json answer_to_json(const AnswerValue& v) {
  nlohmann::ordered_json j;
  j["kind"] = answer_kind_name(answer_kind(v));
  struct Visitor {
    nlohmann::ordered_json& j;
    void operator()(Count c) const { j["value"] = c.value; }
    void operator()(YesNo y) const { j["value"] = y.value; }
    void operator()(Letter l) const { j["value"] = std::string(1, l.value); }
    void operator()(GridDims g) const {
      j["value"] = nlohmann::ordered_json{{"rows", g.rows}, {"cols", g.cols}};
    }
  };
  std::visit(Visitor{j}, v);
  return j;
}

inline AnswerValue answer_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "count") return Count(j.at("value").get<int>());
  if (kind == "yes_no") return YesNo(j.at("value").get<bool>());
  if (kind == "letter") {
    std::string s = j.at("value").get<std::string>();
    if (s.size() != 1) throw std::invalid_argument("letter value must be one char");
    return Letter(s[0]);
  }
  if (kind == "grid_dims")
    return GridDims(j.at("value").at("rows").get<int>(),
                    j.at("value").at("cols").get<int>());
  throw std::invalid_argument("unknown answer kind: " + kind);
}

}  // namespace geoprobe
