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
// Free-text answer normalization. Every parser is pure and total: any byte
// string yields exactly one ParseOutcome. Counting answers take the LAST
// numeric mention (models conclude with the answer); yes/no takes the
// FIRST commitment (hedged replies lead with it). The rules are pinned by
// the fixture corpus under tests/testdata/parser_fixtures.jsonl.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geoprobe/answer.hpp"

namespace geoprobe {

struct Parsed {
  AnswerValue value;

  friend bool operator==(const Parsed& a, const Parsed& b) {
    return a.value == b.value;
  }
};

struct NoAnswerFound {
  std::string reason;

  friend bool operator==(const NoAnswerFound&, const NoAnswerFound&) {
    return true;  // the reason text is diagnostic, not semantic
  }
};

struct Ambiguous {
  std::vector<std::string> candidates;  // >= 2 distinct

  friend bool operator==(const Ambiguous& a, const Ambiguous& b) {
    return a.candidates == b.candidates;
  }
};

using ParseOutcome = std::variant<Parsed, NoAnswerFound, Ambiguous>;

inline bool is_parsed(const ParseOutcome& o) {
  return std::holds_alternative<Parsed>(o);
}

namespace detail {

inline bool ascii_alpha(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline char ascii_lower(unsigned char c) {
  return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

inline const std::array<const char*, 21>& number_words() {
  static const std::array<const char*, 21> words = {
      "zero", "one", "two", "three", "four", "five", "six", "seven",
      "eight", "nine", "ten", "eleven", "twelve", "thirteen", "fourteen",
      "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  return words;
}

struct Token {
  std::string text;   // lowercased; word chars only
  size_t begin = 0;   // byte offsets into the original text
  size_t end = 0;
  int number = -1;    // parsed value if this token is a numeric mention
};

// Words are runs of letters (plus any non-ASCII bytes, kept opaque);
// digit runs are separate tokens, so "4x7" splits into three. An
// apostrophe between letters joins ("don't" -> "dont").
inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    unsigned char c = text[i];
    if (ascii_digit(c)) {
      Token t;
      t.begin = i;
      while (i < n && ascii_digit(static_cast<unsigned char>(text[i])))
        t.text.push_back(text[i++]);
      t.end = i;
      if (t.text.size() <= 6) t.number = std::stoi(t.text);
      tokens.push_back(std::move(t));
    } else if (ascii_alpha(c) || c >= 0x80) {
      Token t;
      t.begin = i;
      while (i < n) {
        unsigned char cc = text[i];
        if (ascii_alpha(cc) || cc >= 0x80) {
          t.text.push_back(ascii_lower(cc));
          ++i;
        } else if (cc == '\'' && i + 1 < n &&
                   ascii_alpha(static_cast<unsigned char>(text[i + 1]))) {
          ++i;  // join contraction
        } else {
          break;
        }
      }
      t.end = i;
      for (size_t w = 0; w < number_words().size(); ++w) {
        if (t.text == number_words()[w]) {
          t.number = static_cast<int>(w);
          break;
        }
      }
      tokens.push_back(std::move(t));
    } else {
      ++i;
    }
  }
  return tokens;
}

inline bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Collapses same-priority candidates: one distinct -> Parsed via `make`,
// several -> Ambiguous, none -> nullopt.
template <typename MakeFn>
inline std::optional<ParseOutcome> resolve_candidates(
    const std::vector<std::string>& found, MakeFn&& make) {
  std::vector<std::string> distinct;
  for (const std::string& c : found) {
    if (std::find(distinct.begin(), distinct.end(), c) == distinct.end())
      distinct.push_back(c);
  }
  if (distinct.empty()) return std::nullopt;
  if (distinct.size() == 1) return ParseOutcome{Parsed{make(distinct[0])}};
  return ParseOutcome{Ambiguous{std::move(distinct)}};
}

}  // namespace detail

// Last in-range numeric mention (digits or number words zero..twenty).
inline ParseOutcome parse_count(const std::string& text) {
  std::optional<int> last;
  for (const detail::Token& t : detail::tokenize(text)) {
    if (t.number >= 0 && t.number <= 20) last = t.number;
  }
  if (!last) return NoAnswerFound{"no numeric mention in range 0..20"};
  return Parsed{Count(*last)};
}

// First yes/no commitment wins. "not"/"don't" count as a no only within a
// 3-token window before an "intersect" word.
inline ParseOutcome parse_yesno(const std::string& text) {
  const std::vector<detail::Token> tokens = detail::tokenize(text);
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& w = tokens[i].text;
    if (w == "yes" || w == "yeah" || w == "correct") return Parsed{YesNo(true)};
    if (w == "no") return Parsed{YesNo(false)};
    if (w == "not" || w == "dont") {
      for (size_t j = i + 1; j < tokens.size() && j <= i + 3; ++j) {
        if (detail::starts_with(tokens[j].text, "intersect"))
          return Parsed{YesNo(false)};
      }
    }
    if (w == "do" && i + 1 < tokens.size() &&
        detail::starts_with(tokens[i + 1].text, "intersect"))
      return Parsed{YesNo(true)};
  }
  return NoAnswerFound{"no yes/no commitment found"};
}

// Priorities: quoted single letter, then "letter X", then a lone
// single-character token. Distinct same-priority candidates -> Ambiguous.
inline ParseOutcome parse_letter(const std::string& text) {
  // Priority 1: 'a' or "a" in the raw text.
  std::vector<std::string> quoted;
  for (size_t i = 0; i + 2 < text.size(); ++i) {
    char q = text[i];
    if (q != '\'' && q != '"') continue;
    unsigned char mid = text[i + 1];
    if (detail::ascii_alpha(mid) && text[i + 2] == q)
      quoted.push_back(std::string(1, detail::ascii_lower(mid)));
  }
  auto make_letter = [](const std::string& s) { return AnswerValue{Letter(s[0])}; };
  if (auto out = detail::resolve_candidates(quoted, make_letter)) return *out;

  const std::vector<detail::Token> tokens = detail::tokenize(text);

  // Priority 2: "letter X".
  std::vector<std::string> named;
  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].text == "letter" && tokens[i + 1].text.size() == 1 &&
        detail::ascii_alpha(tokens[i + 1].text[0]))
      named.push_back(tokens[i + 1].text);
  }
  if (auto out = detail::resolve_candidates(named, make_letter)) return *out;

  // Priority 3: lone single-character alphabetic tokens.
  std::vector<std::string> lone;
  for (const detail::Token& t : tokens) {
    if (t.text.size() == 1 && detail::ascii_alpha(t.text[0]))
      lone.push_back(t.text);
  }
  if (auto out = detail::resolve_candidates(lone, make_letter)) return *out;

  return NoAnswerFound{"no single-letter mention found"};
}

// Priority 1: R x C / RxC / R,C (digits or number words). Priority 2:
// "N rows" and "M columns" mentions anywhere, order-free.
inline ParseOutcome parse_grid_dims(const std::string& text) {
  const std::vector<detail::Token> tokens = detail::tokenize(text);
  auto in_range = [](int v) { return v >= 1 && v <= 20; };

  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].number < 0 || !in_range(tokens[i].number)) continue;
    // "R x C" / "R × C": the separator is itself a token.
    if (i + 2 < tokens.size() &&
        (tokens[i + 1].text == "x" || tokens[i + 1].text == "\xc3\x97") &&
        tokens[i + 2].number >= 0 && in_range(tokens[i + 2].number)) {
      return Parsed{GridDims(tokens[i].number, tokens[i + 2].number)};
    }
    // "R,C": adjacent numeric tokens with a comma in the gap.
    if (tokens[i + 1].number >= 0 && in_range(tokens[i + 1].number)) {
      bool comma = false;
      for (size_t p = tokens[i].end; p < tokens[i + 1].begin; ++p)
        if (text[p] == ',') comma = true;
      if (comma) return Parsed{GridDims(tokens[i].number, tokens[i + 1].number)};
    }
  }

  std::optional<int> rows, cols;
  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].number < 0 || !in_range(tokens[i].number)) continue;
    const std::string& unit = tokens[i + 1].text;
    if (!rows && detail::starts_with(unit, "row")) rows = tokens[i].number;
    if (!cols && (detail::starts_with(unit, "col") || unit == "columns"))
      cols = tokens[i].number;
  }
  if (rows && cols) return Parsed{GridDims(*rows, *cols)};
  if (rows || cols) return NoAnswerFound{"only one grid dimension found"};
  return NoAnswerFound{"no grid dimensions found"};
}

// Dispatch on the task's declared answer shape.
inline ParseOutcome parse_for_task(int task_id, const std::string& text) {
  switch (answer_kind_for_task(task_id)) {
    case AnswerKind::count: return parse_count(text);
    case AnswerKind::yes_no: return parse_yesno(text);
    case AnswerKind::letter: return parse_letter(text);
    case AnswerKind::grid_dims: return parse_grid_dims(text);
  }
  throw std::invalid_argument("unknown task id " + std::to_string(task_id));
}

inline nlohmann::ordered_json outcome_to_json(const ParseOutcome& o) {
  struct Visitor {
    nlohmann::ordered_json operator()(const Parsed& p) const {
      return answer_to_json(p.value);
    }
    nlohmann::ordered_json operator()(const NoAnswerFound& n) const {
      return {{"kind", "no_answer"}, {"reason", n.reason}};
    }
    nlohmann::ordered_json operator()(const Ambiguous& a) const {
      return {{"kind", "ambiguous"}, {"candidates", a.candidates}};
    }
  };
  return std::visit(Visitor{}, o);
}

inline ParseOutcome outcome_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "no_answer")
    return NoAnswerFound{j.value("reason", std::string())};
  if (kind == "ambiguous")
    return Ambiguous{j.at("candidates").get<std::vector<std::string>>()};
  return Parsed{answer_from_json(j)};
}

}  // namespace geoprobe
