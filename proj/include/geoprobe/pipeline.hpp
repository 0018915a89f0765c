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
// The two evaluation modes. Direct VQA sends the image plus the question
// in one request. Captioned mode decomposes the task into three stages:
// keywords are extracted from the question by a text model, a VLM captions
// the image under a keyword-bearing prompt, and a text model answers from
// the caption alone. The answer stage never sees image bytes; that
// separation is enforced by the request builders, not by prompt wording.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "geoprobe/backend.hpp"
#include "geoprobe/generators.hpp"
#include "geoprobe/parse.hpp"

namespace geoprobe {

inline constexpr const char* kPromptTemplateSet = "v1";
inline constexpr const char* kParserRulesVersion = "v1";

class EmptyKeywordsError : public Error {
 public:
  using Error::Error;
};

enum class RunMode { direct, captioned, both };

inline std::string run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::direct: return "direct";
    case RunMode::captioned: return "captioned";
    case RunMode::both: return "both";
  }
  return "both";
}

inline RunMode run_mode_from_name(const std::string& s) {
  if (s == "direct") return RunMode::direct;
  if (s == "captioned") return RunMode::captioned;
  if (s == "both") return RunMode::both;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

struct RunConfig {
  RunMode mode = RunMode::both;
  std::string label = "model";
  int max_concurrency = 4;
  std::string prompt_template_set = kPromptTemplateSet;
};

// Resolved stage backends. Captioned mode requires keyword, caption and
// answer; direct mode requires direct.
struct BackendSet {
  std::shared_ptr<Backend> direct;
  std::shared_ptr<Backend> keyword;
  std::shared_ptr<Backend> caption;
  std::shared_ptr<Backend> answer;
  std::shared_ptr<TransportStats> stats;
};

struct StageError {
  std::string stage;
  std::string kind;
  std::string message;
};

struct PipelineTrace {
  std::string instance_id;
  int task_id = 0;
  std::string mode;  // "direct" or "captioned"
  std::optional<std::vector<std::string>> keywords;
  std::optional<std::string> caption;
  std::string raw_answer;
  ParseOutcome parsed = NoAnswerFound{"no model reply"};
  std::optional<bool> correct;  // filled by evaluation
  std::map<std::string, int> stage_latencies_ms;
  std::map<std::string, std::string> backend_ids;
  std::map<std::string, std::string> stage_digests;
  std::optional<StageError> error;
};

// --- Prompt templates (set "v1") ---------------------------------------------

inline std::string keyword_prompt(const std::string& question) {
  return "List 2 to 4 concise keywords (1-2 words each) that capture the "
         "essence of this question. Reply with only the keywords, separated "
         "by commas.\nQuestion: " +
         question;
}

inline std::string caption_prompt(const std::vector<std::string>& keywords) {
  std::string joined;
  for (size_t i = 0; i < keywords.size(); ++i) {
    if (i) joined += ", ";
    joined += keywords[i];
  }
  return "Provide a detailed caption for the image using keywords: " + joined;
}

inline std::string answer_prompt(const std::string& caption,
                                 const std::string& question) {
  return "Caption: " + caption +
         "\n\nBased only on the caption above, answer the question.\n"
         "Question: " +
         question + "\nAnswer concisely.";
}

// --- Keyword normalization ------------------------------------------------------

// Comma/semicolon/newline separated reply -> lowercased, deduplicated
// keywords, each at most 2 words, at most 4 keywords.
inline std::vector<std::string> parse_keyword_reply(const std::string& reply) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    // Trim, lowercase, collapse whitespace.
    std::vector<std::string> words;
    std::string word;
    for (char c : current) {
      if (c == ' ' || c == '\t') {
        if (!word.empty()) words.push_back(word);
        word.clear();
      } else {
        word.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                            : c);
      }
    }
    if (!word.empty()) words.push_back(word);
    current.clear();
    if (words.empty()) return;
    if (words.size() > 2) words.resize(2);  // longer phrases keep 2 words
    std::string keyword = words[0];
    for (size_t i = 1; i < words.size(); ++i) keyword += " " + words[i];
    bool has_alnum = false;
    for (char c : keyword)
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) has_alnum = true;
    if (!has_alnum) return;
    if (std::find(out.begin(), out.end(), keyword) == out.end())
      out.push_back(keyword);
  };
  for (char c : reply) {
    if (c == ',' || c == ';' || c == '\n') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  if (out.size() > 4) out.resize(4);
  return out;
}

// First two content words of the question, used when keyword extraction
// yields nothing.
inline std::vector<std::string> fallback_keywords(const std::string& question) {
  static const std::set<std::string> stopwords = {
      "a",    "an",   "and",  "are", "as",   "at",   "be",   "by",
      "do",   "does", "for",  "from", "has", "have", "how",  "i",
      "in",   "is",   "it",   "its", "many", "much", "of",   "on",
      "or",   "that", "the",  "this", "to",  "was",  "were", "what",
      "which", "will", "with"};
  std::vector<std::string> out;
  for (const auto& token : detail::tokenize(question)) {
    if (stopwords.count(token.text)) continue;
    out.push_back(token.text);
    if (out.size() == 2) break;
  }
  if (out.empty()) out.push_back("image");
  return out;
}

// --- Stage operations -------------------------------------------------------------

struct StageResult {
  std::string text;
  int latency_ms = 0;
  std::string digest;
};

namespace detail {

inline ModelRequest stage_request(Backend& backend,
                                  std::vector<MessagePart> parts) {
  ModelRequest req;
  req.model_id = backend.model_id();
  req.messages.push_back({"user", std::move(parts)});
  return req;
}

inline StageResult run_stage(Backend& backend, ModelRequest req) {
  StageResult out;
  out.digest = request_digest(req);
  ModelResponse resp = backend.complete(req);
  out.text = resp.text;
  out.latency_ms = resp.latency_ms;
  return out;
}

}  // namespace detail

// Keywords for one question. Throws EmptyKeywordsError when the reply
// contains no usable keyword; run_dataset falls back to the question's
// content words instead.
inline std::vector<std::string> extract_keywords(const std::string& question,
                                                 Backend& backend) {
  if (question.empty())
    throw std::invalid_argument("extract_keywords: empty question");
  StageResult r = detail::run_stage(
      backend,
      detail::stage_request(backend,
                            {MessagePart::make_text(keyword_prompt(question))}));
  std::vector<std::string> keywords = parse_keyword_reply(r.text);
  if (keywords.empty())
    throw EmptyKeywordsError("keyword reply yielded no valid keyword: '" +
                             r.text + "'");
  return keywords;
}

// Captions the image under the keyword-bearing template; the model text is
// returned verbatim apart from surrounding whitespace.
inline StageResult caption_image(const std::vector<uint8_t>& image,
                                 const std::vector<std::string>& keywords,
                                 Backend& backend) {
  if (keywords.empty())
    throw std::invalid_argument("caption_image: needs at least one keyword");
  StageResult r = detail::run_stage(
      backend,
      detail::stage_request(backend,
                            {MessagePart::make_text(caption_prompt(keywords)),
                             MessagePart::make_image(image)}));
  size_t begin = r.text.find_first_not_of(" \t\r\n");
  size_t end = r.text.find_last_not_of(" \t\r\n");
  r.text = begin == std::string::npos ? "" : r.text.substr(begin, end - begin + 1);
  return r;
}

// Text-only answering stage; the image is structurally absent here.
inline StageResult answer_from_caption(const std::string& caption,
                                       const std::string& question,
                                       Backend& backend) {
  if (caption.empty())
    throw std::invalid_argument("answer_from_caption: empty caption");
  return detail::run_stage(
      backend, detail::stage_request(
                   backend, {MessagePart::make_text(
                                answer_prompt(caption, question))}));
}

inline StageResult direct_vqa(const std::vector<uint8_t>& image,
                              const std::string& question, Backend& backend) {
  return detail::run_stage(
      backend,
      detail::stage_request(backend, {MessagePart::make_text(question),
                                      MessagePart::make_image(image)}));
}

// --- Trace serialization -------------------------------------------------------

inline nlohmann::ordered_json trace_to_json(const PipelineTrace& t) {
  nlohmann::ordered_json j;
  j["instance_id"] = t.instance_id;
  j["task_id"] = t.task_id;
  j["mode"] = t.mode;
  if (t.keywords)
    j["keywords"] = *t.keywords;
  else
    j["keywords"] = nullptr;
  if (t.caption)
    j["caption"] = *t.caption;
  else
    j["caption"] = nullptr;
  j["raw_answer"] = t.raw_answer;
  j["parsed"] = outcome_to_json(t.parsed);
  if (t.correct)
    j["correct"] = *t.correct;
  else
    j["correct"] = nullptr;
  j["stage_latencies_ms"] = t.stage_latencies_ms;
  j["backend_ids"] = t.backend_ids;
  j["stage_digests"] = t.stage_digests;
  if (t.error) {
    j["error"] = {{"stage", t.error->stage},
                  {"kind", t.error->kind},
                  {"message", t.error->message}};
  } else {
    j["error"] = nullptr;
  }
  return j;
}

inline PipelineTrace trace_from_json(const nlohmann::json& j) {
  PipelineTrace t;
  t.instance_id = j.at("instance_id").get<std::string>();
  t.task_id = j.at("task_id").get<int>();
  t.mode = j.at("mode").get<std::string>();
  if (!j.at("keywords").is_null())
    t.keywords = j.at("keywords").get<std::vector<std::string>>();
  if (!j.at("caption").is_null())
    t.caption = j.at("caption").get<std::string>();
  t.raw_answer = j.at("raw_answer").get<std::string>();
  t.parsed = outcome_from_json(j.at("parsed"));
  if (!j.at("correct").is_null()) t.correct = j.at("correct").get<bool>();
  if (j.contains("stage_latencies_ms"))
    t.stage_latencies_ms =
        j.at("stage_latencies_ms").get<std::map<std::string, int>>();
  if (j.contains("backend_ids"))
    t.backend_ids = j.at("backend_ids").get<std::map<std::string, std::string>>();
  if (j.contains("stage_digests"))
    t.stage_digests =
        j.at("stage_digests").get<std::map<std::string, std::string>>();
  if (!j.at("error").is_null()) {
    t.error = StageError{j.at("error").at("stage").get<std::string>(),
                         j.at("error").at("kind").get<std::string>(),
                         j.at("error").at("message").get<std::string>()};
  }
  return t;
}

inline std::vector<PipelineTrace> load_traces(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open traces: " + path.string());
  std::vector<PipelineTrace> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(trace_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

// --- Run orchestration -----------------------------------------------------------

namespace detail {

inline StageError stage_error_from(const std::string& stage,
                                   const std::exception& e) {
  std::string kind = "error";
  if (const auto* be = dynamic_cast<const BackendError*>(&e))
    kind = BackendError::kind_name(be->kind());
  else if (dynamic_cast<const EmptyKeywordsError*>(&e))
    kind = "empty_keywords";
  return StageError{stage, kind, e.what()};
}

struct KeywordStage {
  std::vector<std::string> keywords;
  int latency_ms = 0;
  std::string digest;
  bool used_fallback = false;
  std::optional<StageError> error;
};

// One keyword extraction per distinct question string.
inline KeywordStage keyword_stage_for_question(const std::string& question,
                                               Backend& backend) {
  KeywordStage out;
  ModelRequest req =
      stage_request(backend, {MessagePart::make_text(keyword_prompt(question))});
  out.digest = request_digest(req);
  try {
    ModelResponse resp = backend.complete(req);
    out.latency_ms = resp.latency_ms;
    out.keywords = parse_keyword_reply(resp.text);
    if (out.keywords.empty()) {
      out.keywords = fallback_keywords(question);
      out.used_fallback = true;
    }
  } catch (const std::exception& e) {
    out.error = stage_error_from("keywords", e);
  }
  return out;
}

inline std::vector<uint8_t> read_binary_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + p.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace detail

struct RunResult {
  std::vector<PipelineTrace> traces;
  int errors = 0;
  int64_t wall_ms = 0;
};

// Runs the configured mode(s) over every manifest instance. Per-instance
// stage failures land on the trace and never abort the run. Traces are
// persisted in (task_id, index, mode) order no matter how workers finish.
inline RunResult run_dataset(const std::vector<TaskInstance>& manifest,
                             const std::filesystem::path& dataset_dir,
                             const RunConfig& config, const BackendSet& backends,
                             const std::filesystem::path& run_dir) {
  namespace fs = std::filesystem;
  const bool want_direct =
      config.mode == RunMode::direct || config.mode == RunMode::both;
  const bool want_captioned =
      config.mode == RunMode::captioned || config.mode == RunMode::both;
  if (config.max_concurrency < 1)
    throw std::invalid_argument("max_concurrency must be >= 1");
  if (want_direct && !backends.direct)
    throw std::invalid_argument("direct mode requires a direct backend");
  if (want_captioned &&
      (!backends.keyword || !backends.caption || !backends.answer))
    throw std::invalid_argument(
        "captioned mode requires keyword, caption and answer backends");

  auto t_start = std::chrono::steady_clock::now();

  // Keyword extraction once per distinct question, before the worker pool.
  std::map<std::string, detail::KeywordStage> keyword_cache;
  if (want_captioned) {
    for (const TaskInstance& inst : manifest) {
      if (!keyword_cache.count(inst.question)) {
        keyword_cache[inst.question] =
            detail::keyword_stage_for_question(inst.question, *backends.keyword);
      }
    }
  }

  struct Job {
    const TaskInstance* inst;
    bool captioned;
  };
  std::vector<Job> jobs;
  for (const TaskInstance& inst : manifest) {
    if (want_direct) jobs.push_back({&inst, false});
    if (want_captioned) jobs.push_back({&inst, true});
  }

  std::vector<PipelineTrace> traces(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
      const TaskInstance& inst = *jobs[j].inst;
      PipelineTrace trace;
      trace.instance_id = inst.instance_id;
      trace.task_id = inst.task_id;
      trace.mode = jobs[j].captioned ? "captioned" : "direct";
      try {
        std::vector<uint8_t> image =
            detail::read_binary_file(dataset_dir / inst.image_path);
        if (!jobs[j].captioned) {
          trace.backend_ids["direct"] = backends.direct->id();
          StageResult r = direct_vqa(image, inst.question, *backends.direct);
          trace.raw_answer = r.text;
          trace.stage_latencies_ms["direct"] = r.latency_ms;
          trace.stage_digests["direct"] = r.digest;
        } else {
          trace.backend_ids["keywords"] = backends.keyword->id();
          trace.backend_ids["caption"] = backends.caption->id();
          trace.backend_ids["answer"] = backends.answer->id();
          const detail::KeywordStage& kw = keyword_cache.at(inst.question);
          trace.stage_latencies_ms["keywords"] = kw.latency_ms;
          trace.stage_digests["keywords"] = kw.digest;
          if (kw.error) {
            trace.error = kw.error;  // keep the original stage and kind
          } else {
            trace.keywords = kw.keywords;

            StageResult cap =
                caption_image(image, kw.keywords, *backends.caption);
            trace.caption = cap.text;
            trace.stage_latencies_ms["caption"] = cap.latency_ms;
            trace.stage_digests["caption"] = cap.digest;

            StageResult ans =
                answer_from_caption(cap.text, inst.question, *backends.answer);
            trace.raw_answer = ans.text;
            trace.stage_latencies_ms["answer"] = ans.latency_ms;
            trace.stage_digests["answer"] = ans.digest;
          }
        }
        if (!trace.error) {
          trace.parsed = parse_for_task(inst.task_id, trace.raw_answer);
        } else {
          trace.parsed = NoAnswerFound{"stage error: " + trace.error->message};
        }
      } catch (const std::exception& e) {
        std::string stage = jobs[j].captioned
                                ? (trace.caption ? "answer"
                                   : trace.keywords ? "caption" : "keywords")
                                : "direct";
        trace.error = detail::stage_error_from(stage, e);
        trace.parsed = NoAnswerFound{"stage error: " + std::string(e.what())};
      }
      traces[j] = std::move(trace);
    }
  };

  if (config.max_concurrency == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < config.max_concurrency; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Keyword-stage errors take precedence over the generic wrapper above.
  RunResult result;
  result.traces = std::move(traces);
  for (PipelineTrace& t : result.traces)
    if (t.error) ++result.errors;
  result.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();

  fs::create_directories(run_dir);
  std::string lines;
  for (const PipelineTrace& t : result.traces)
    lines += trace_to_json(t).dump() + "\n";
  {
    std::ofstream out(run_dir / "traces.jsonl", std::ios::binary);
    if (!out) throw IoError("cannot write traces.jsonl");
    out << lines;
  }

  nlohmann::ordered_json meta;
  meta["label"] = config.label;
  meta["mode"] = run_mode_name(config.mode);
  meta["prompt_template_set"] = config.prompt_template_set;
  meta["parser_rules"] = kParserRulesVersion;
  meta["max_concurrency"] = config.max_concurrency;
  nlohmann::ordered_json ids;
  if (backends.direct) ids["direct"] = backends.direct->id();
  if (backends.keyword) ids["keywords"] = backends.keyword->id();
  if (backends.caption) ids["caption"] = backends.caption->id();
  if (backends.answer) ids["answer"] = backends.answer->id();
  meta["backend_ids"] = ids;
  meta["counts"] = {{"instances", manifest.size()},
                    {"traces", result.traces.size()},
                    {"errors", result.errors}};
  meta["cache_stats"] =
      backends.stats ? backends.stats->to_json() : nlohmann::ordered_json();
  meta["wall_ms"] = result.wall_ms;
  meta["version"] = std::string("geoprobe-") + kVersion;
  {
    std::ofstream out(run_dir / "run_meta.json", std::ios::binary);
    if (!out) throw IoError("cannot write run_meta.json");
    out << meta.dump(2) << "\n";
  }
  return result;
}

}  // namespace geoprobe
