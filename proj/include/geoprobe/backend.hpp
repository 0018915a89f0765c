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
// Uniform client over chat-completion style endpoints with image support,
// plus a content-addressed record/replay cache and a scripted offline
// backend. Replay mode is hermetic: it never constructs a transport, and a
// shared counter proves that no network call happened.

#pragma once

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "geoprobe/core.hpp"
#include "geoprobe/sha256.hpp"

namespace geoprobe {

struct MessagePart {
  enum class Kind { text, image };
  Kind kind = Kind::text;
  std::string text;
  std::vector<uint8_t> image;
  std::string media_type = "image/png";

  static MessagePart make_text(std::string t) {
    MessagePart p;
    p.kind = Kind::text;
    p.text = std::move(t);
    return p;
  }
  static MessagePart make_image(std::vector<uint8_t> bytes,
                                std::string media = "image/png") {
    MessagePart p;
    p.kind = Kind::image;
    p.image = std::move(bytes);
    p.media_type = std::move(media);
    return p;
  }
};

struct Message {
  std::string role;  // "system" or "user"
  std::vector<MessagePart> parts;
};

struct ModelRequest {
  std::string model_id;
  std::vector<Message> messages;
  double temperature = 0.0;
  int max_tokens = 256;
};

enum class FinishReason { stop, length, error };

struct TokenUsage {
  int prompt = 0;
  int completion = 0;
};

struct ModelResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  int latency_ms = 0;
  std::optional<TokenUsage> usage;
};

enum class BackendKind { http_openai_compatible, replay, scripted };
enum class CacheMode { off, record, replay };

struct ScriptedRule {
  std::string contains;
  std::string reply;
};

struct BackendConfig {
  std::string name = "default";
  BackendKind kind = BackendKind::scripted;
  std::string base_url;
  std::string api_key_env;  // names the env var; never holds the secret
  std::string model_id;
  double timeout_s = 60;
  int max_retries = 3;
  CacheMode cache_mode = CacheMode::off;
  std::string cache_dir;
  std::vector<ScriptedRule> rules;
  std::string default_reply;
};

enum class BackendErrorKind {
  missing_cache_entry,
  auth,
  exhausted_retries,
  malformed_response,
  transport,
  config,
};

class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, const std::string& what,
               std::string digest = "")
      : Error(what), kind_(kind), digest_(std::move(digest)) {}

  BackendErrorKind kind() const { return kind_; }
  const std::string& digest() const { return digest_; }

  static const char* kind_name(BackendErrorKind k) {
    switch (k) {
      case BackendErrorKind::missing_cache_entry: return "missing_cache_entry";
      case BackendErrorKind::auth: return "auth";
      case BackendErrorKind::exhausted_retries: return "exhausted_retries";
      case BackendErrorKind::malformed_response: return "malformed_response";
      case BackendErrorKind::transport: return "transport";
      case BackendErrorKind::config: return "config";
    }
    return "unknown";
  }

 private:
  BackendErrorKind kind_;
  std::string digest_;
};

// Shared run-wide counters; the hermetic tests assert network_calls == 0.
struct TransportStats {
  std::atomic<int64_t> network_calls{0};
  std::atomic<int64_t> cache_hits{0};
  std::atomic<int64_t> cache_misses{0};
  std::atomic<int64_t> cache_stores{0};

  nlohmann::ordered_json to_json() const {
    return {{"network_calls", network_calls.load()},
            {"cache_hits", cache_hits.load()},
            {"cache_misses", cache_misses.load()},
            {"cache_stores", cache_stores.load()}};
  }
};

// SHA-256 over a canonical serialization: model id, decoding parameters,
// then each message's role and parts (text verbatim, images by their own
// SHA-256). Stable across platforms.
inline std::string request_digest(const ModelRequest& req) {
  std::string canon;
  canon += "model_id\n" + req.model_id + "\n";
  char tbuf[48];
  std::snprintf(tbuf, sizeof(tbuf), "%.6f", req.temperature);
  canon += std::string("temperature\n") + tbuf + "\n";
  canon += "max_tokens\n" + std::to_string(req.max_tokens) + "\n";
  for (const Message& m : req.messages) {
    canon += "message\n" + m.role + "\n";
    for (const MessagePart& p : m.parts) {
      if (p.kind == MessagePart::Kind::text) {
        canon += "text\n" + std::to_string(p.text.size()) + "\n" + p.text + "\n";
      } else {
        canon += "image\n" + p.media_type + "\n" + sha256_hex(p.image) + "\n";
      }
    }
  }
  return sha256_hex(canon);
}

class Backend {
 public:
  virtual ~Backend() = default;
  virtual ModelResponse complete(const ModelRequest& req) = 0;
  virtual std::string id() const = 0;
  // Model identifier stamped into requests (and so into digests).
  virtual std::string model_id() const = 0;
};

// --- Scripted backend ---------------------------------------------------------

// Deterministic offline stand-in: the first rule whose `contains` string
// occurs in any text part wins; otherwise the default reply.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(BackendConfig config) : config_(std::move(config)) {}

  ModelResponse complete(const ModelRequest& req) override {
    std::string haystack;
    for (const Message& m : req.messages)
      for (const MessagePart& p : m.parts)
        if (p.kind == MessagePart::Kind::text) haystack += p.text + "\n";
    ModelResponse resp;
    resp.text = config_.default_reply;
    for (const ScriptedRule& rule : config_.rules) {
      if (haystack.find(rule.contains) != std::string::npos) {
        resp.text = rule.reply;
        break;
      }
    }
    resp.finish_reason = FinishReason::stop;
    resp.latency_ms = 0;
    return resp;
  }

  std::string id() const override { return "scripted:" + config_.name; }

  std::string model_id() const override {
    return config_.model_id.empty() ? config_.name : config_.model_id;
  }

 private:
  BackendConfig config_;
};

// --- Record / replay cache ------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json request_summary(const ModelRequest& req) {
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const Message& m : req.messages) {
    nlohmann::ordered_json parts = nlohmann::ordered_json::array();
    for (const MessagePart& p : m.parts) {
      if (p.kind == MessagePart::Kind::text) {
        parts.push_back({{"type", "text"}, {"text", p.text}});
      } else {
        parts.push_back({{"type", "image"},
                         {"media_type", p.media_type},
                         {"sha256", sha256_hex(p.image)}});
      }
    }
    messages.push_back({{"role", m.role}, {"parts", parts}});
  }
  return {{"model_id", req.model_id},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens},
          {"messages", messages}};
}

inline const char* finish_reason_name(FinishReason r) {
  switch (r) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "stop";
}

inline FinishReason finish_reason_from_name(const std::string& s) {
  if (s == "length") return FinishReason::length;
  if (s == "error") return FinishReason::error;
  return FinishReason::stop;
}

}  // namespace detail

// Content-addressed response store: <dir>/<first2>/<digest>.json holding
// the request summary and the full response. Writes are atomic
// (temp-then-rename); concurrent writers of one digest are benign.
class ReplayCache {
 public:
  explicit ReplayCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path entry_path(const std::string& digest) const {
    return dir_ / digest.substr(0, 2) / (digest + ".json");
  }

  std::optional<ModelResponse> load(const std::string& digest) const {
    std::ifstream in(entry_path(digest));
    if (!in) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
      throw BackendError(BackendErrorKind::malformed_response,
                         "corrupt cache entry " + digest, digest);
    const nlohmann::json& r = j.at("response");
    ModelResponse resp;
    resp.text = r.at("text").get<std::string>();
    resp.finish_reason =
        detail::finish_reason_from_name(r.value("finish_reason", "stop"));
    resp.latency_ms = r.value("latency_ms", 0);
    if (r.contains("usage") && !r.at("usage").is_null()) {
      resp.usage = TokenUsage{r.at("usage").value("prompt", 0),
                              r.at("usage").value("completion", 0)};
    }
    return resp;
  }

  void store(const std::string& digest, const ModelRequest& req,
             const ModelResponse& resp) const {
    nlohmann::ordered_json j;
    j["digest"] = digest;
    j["request"] = detail::request_summary(req);
    j["response"] = {{"text", resp.text},
                     {"finish_reason", detail::finish_reason_name(resp.finish_reason)},
                     {"latency_ms", resp.latency_ms}};
    if (resp.usage) {
      j["response"]["usage"] = {{"prompt", resp.usage->prompt},
                                {"completion", resp.usage->completion}};
    } else {
      j["response"]["usage"] = nullptr;
    }
    std::filesystem::path path = entry_path(digest);
    std::filesystem::create_directories(path.parent_path());
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << ::getpid() << "."
             << std::this_thread::get_id();
    std::filesystem::path tmp = path.parent_path() / tmp_name.str();
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw IoError("cache: cannot write " + tmp.string());
      out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  std::filesystem::path dir_;
};

// --- HTTP backend -----------------------------------------------------------------

namespace detail {

inline std::string base64_encode(const std::vector<uint8_t>& data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  for (size_t i = 0; i < data.size(); i += 3) {
    uint32_t chunk = static_cast<uint32_t>(data[i]) << 16;
    if (i + 1 < data.size()) chunk |= static_cast<uint32_t>(data[i + 1]) << 8;
    if (i + 2 < data.size()) chunk |= data[i + 2];
    out.push_back(alphabet[(chunk >> 18) & 0x3f]);
    out.push_back(alphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < data.size() ? alphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < data.size() ? alphabet[chunk & 0x3f] : '=');
  }
  return out;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix, possibly empty
};

inline SplitUrl split_url(const std::string& base_url) {
  size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos)
    throw BackendError(BackendErrorKind::config,
                       "base_url missing scheme: " + base_url);
  size_t path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

inline nlohmann::ordered_json wire_body(const ModelRequest& req) {
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const Message& m : req.messages) {
    nlohmann::ordered_json content = nlohmann::ordered_json::array();
    for (const MessagePart& p : m.parts) {
      if (p.kind == MessagePart::Kind::text) {
        content.push_back({{"type", "text"}, {"text", p.text}});
      } else {
        content.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:" + p.media_type + ";base64," +
                           base64_encode(p.image)}}}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", content}});
  }
  return {{"model", req.model_id},
          {"messages", messages},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens}};
}

}  // namespace detail

// POSTs to {base_url}/chat/completions with bearer auth from the named env
// var. Transient failures (429, 5xx, transport errors) retry with
// exponential backoff: base 1s, factor 2, jitter +/-25%, at most
// max_retries retries. Auth failures never retry.
class HttpBackend : public Backend {
 public:
  using SleepFn = std::function<void(int /*milliseconds*/)>;

  HttpBackend(BackendConfig config, std::shared_ptr<TransportStats> stats,
              SleepFn sleep_fn = nullptr)
      : config_(std::move(config)),
        stats_(std::move(stats)),
        sleep_fn_(sleep_fn ? std::move(sleep_fn) : [](int ms) {
          std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        }),
        jitter_rng_(std::random_device{}()) {}

  ModelResponse complete(const ModelRequest& req) override;

  std::string id() const override {
    return "http:" + (config_.model_id.empty() ? config_.name : config_.model_id);
  }

  std::string model_id() const override { return config_.model_id; }

 private:
  int backoff_ms(int attempt) {
    double base = 1000.0 * std::pow(2.0, attempt);
    std::uniform_real_distribution<double> jitter(0.75, 1.25);
    return static_cast<int>(base * jitter(jitter_rng_));
  }

  BackendConfig config_;
  std::shared_ptr<TransportStats> stats_;
  SleepFn sleep_fn_;
  std::mt19937_64 jitter_rng_;
};

// --- Caching wrapper -----------------------------------------------------------

// record: consult the cache, fall through to the inner backend on a miss
// and store before returning. replay: cache only; a miss is an error that
// names the digest. No inner backend is even constructed for pure replay.
class CachingBackend : public Backend {
 public:
  CachingBackend(BackendConfig config, std::unique_ptr<Backend> inner,
                 std::shared_ptr<TransportStats> stats)
      : config_(std::move(config)),
        inner_(std::move(inner)),
        stats_(std::move(stats)),
        cache_(config_.cache_dir) {
    if (config_.cache_dir.empty())
      throw BackendError(BackendErrorKind::config,
                         "backend '" + config_.name +
                             "': cache_mode requires cache_dir");
  }

  ModelResponse complete(const ModelRequest& req) override {
    const std::string digest = request_digest(req);
    if (auto hit = cache_.load(digest)) {
      if (stats_) stats_->cache_hits++;
      return *hit;
    }
    if (config_.cache_mode == CacheMode::replay || !inner_) {
      throw BackendError(BackendErrorKind::missing_cache_entry,
                         "replay miss: no cache entry for digest " + digest,
                         digest);
    }
    if (stats_) stats_->cache_misses++;
    ModelResponse resp = inner_->complete(req);
    cache_.store(digest, req, resp);
    if (stats_) stats_->cache_stores++;
    return resp;
  }

  std::string id() const override {
    return inner_ ? inner_->id() : "replay:" + config_.name;
  }

  std::string model_id() const override {
    return inner_ ? inner_->model_id() : config_.model_id;
  }

 private:
  BackendConfig config_;
  std::unique_ptr<Backend> inner_;
  std::shared_ptr<TransportStats> stats_;
  ReplayCache cache_;
};

inline std::unique_ptr<Backend> make_backend(
    const BackendConfig& config, std::shared_ptr<TransportStats> stats,
    HttpBackend::SleepFn sleep_fn = nullptr) {
  std::unique_ptr<Backend> inner;
  switch (config.kind) {
    case BackendKind::scripted:
      inner = std::make_unique<ScriptedBackend>(config);
      break;
    case BackendKind::http_openai_compatible:
      inner = std::make_unique<HttpBackend>(config, stats, std::move(sleep_fn));
      break;
    case BackendKind::replay:
      return std::make_unique<CachingBackend>(
          [&] {
            BackendConfig c = config;
            c.cache_mode = CacheMode::replay;
            return c;
          }(),
          nullptr, stats);
  }
  if (config.cache_mode == CacheMode::off) return inner;
  return std::make_unique<CachingBackend>(config, std::move(inner), stats);
}

// --- Config JSON -----------------------------------------------------------------

inline BackendConfig backend_config_from_json(const std::string& name,
                                              const nlohmann::json& j) {
  BackendConfig cfg;
  cfg.name = name;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "http_openai_compatible") {
    cfg.kind = BackendKind::http_openai_compatible;
  } else if (kind == "replay") {
    cfg.kind = BackendKind::replay;
  } else if (kind == "scripted") {
    cfg.kind = BackendKind::scripted;
  } else {
    throw BackendError(BackendErrorKind::config,
                       "backend '" + name + "': unknown kind '" + kind + "'");
  }
  cfg.base_url = j.value("base_url", "");
  cfg.api_key_env = j.value("api_key_env", "");
  cfg.model_id = j.value("model_id", "");
  cfg.timeout_s = j.value("timeout_s", 60.0);
  cfg.max_retries = j.value("max_retries", 3);
  const std::string mode = j.value("cache_mode", "off");
  if (mode == "record") cfg.cache_mode = CacheMode::record;
  else if (mode == "replay") cfg.cache_mode = CacheMode::replay;
  else if (mode == "off") cfg.cache_mode = CacheMode::off;
  else
    throw BackendError(BackendErrorKind::config,
                       "backend '" + name + "': unknown cache_mode '" + mode + "'");
  cfg.cache_dir = j.value("cache_dir", "");
  cfg.default_reply = j.value("default_reply", "");
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules"))
      cfg.rules.push_back({r.at("contains").get<std::string>(),
                           r.at("reply").get<std::string>()});
  }
  return cfg;
}

}  // namespace geoprobe

namespace geoprobe {

inline ModelResponse HttpBackend::complete(const ModelRequest& req) {
  if (config_.api_key_env.empty())
    throw BackendError(BackendErrorKind::config,
                       "backend '" + config_.name + "': api_key_env not set");
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key)
    throw BackendError(BackendErrorKind::auth,
                       "environment variable " + config_.api_key_env +
                           " is not set (backend '" + config_.name + "')");

  detail::SplitUrl url = detail::split_url(config_.base_url);
  const std::string path = url.prefix + "/chat/completions";
  const std::string body = detail::wire_body(req).dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) sleep_fn_(backoff_ms(attempt - 1));
    stats_->network_calls++;

    httplib::Client client(url.origin);
    client.set_connection_timeout(static_cast<int>(config_.timeout_s), 0);
    client.set_read_timeout(static_cast<int>(config_.timeout_s), 0);
    client.set_default_headers(
        {{"Authorization", std::string("Bearer ") + key}});

    auto t0 = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(path, body, "application/json");
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw BackendError(BackendErrorKind::auth,
                         "HTTP " + std::to_string(res->status) + " from " +
                             config_.base_url);
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError(BackendErrorKind::malformed_response,
                         "HTTP " + std::to_string(res->status) + ": " +
                             res->body.substr(0, 200));
    }

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
      throw BackendError(BackendErrorKind::malformed_response,
                         "unparseable completion body: " +
                             res->body.substr(0, 200));
    }
    const nlohmann::json& choice = j["choices"][0];
    ModelResponse out;
    try {
      out.text = choice.at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw BackendError(BackendErrorKind::malformed_response,
                         "completion missing message.content");
    }
    out.finish_reason =
        detail::finish_reason_from_name(choice.value("finish_reason", "stop"));
    out.latency_ms = static_cast<int>(latency);
    if (j.contains("usage") && j["usage"].is_object()) {
      out.usage = TokenUsage{j["usage"].value("prompt_tokens", 0),
                             j["usage"].value("completion_tokens", 0)};
    }
    return out;
  }
  throw BackendError(
      BackendErrorKind::exhausted_retries,
      "gave up after " + std::to_string(config_.max_retries + 1) +
          " attempts; last error: " + last_error);
}

}  // namespace geoprobe
