// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#include "geoprobe/backend.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <future>

namespace geoprobe {
namespace {

namespace fs = std::filesystem;

ModelRequest text_request(const std::string& text,
                          const std::string& model = "test-model") {
  ModelRequest req;
  req.model_id = model;
  req.messages.push_back({"user", {MessagePart::make_text(text)}});
  return req;
}

TEST(RequestDigest, PinnedFixtures) {
  // Expected values computed once with an independent sha256 tool over the
  // documented canonical serialization.
  EXPECT_EQ(request_digest(text_request("hello")),
            "09a594b8725eed2144a186567adcb902f1719eb40f9d5cf364e50552ccb4dc03");

  ModelRequest with_image = text_request("hello");
  with_image.messages[0].parts.push_back(
      MessagePart::make_image({1, 2, 3, 4}));
  EXPECT_EQ(request_digest(with_image),
            "c57e411de1c98de09ca4f998545a35246dce4f8ed406758ea1709d022d3b811c");
}

TEST(RequestDigest, SensitivityRules) {
  ModelRequest a = text_request("hello");
  EXPECT_EQ(request_digest(a), request_digest(text_request("hello")));
  EXPECT_NE(request_digest(a), request_digest(text_request("hello ")));
  EXPECT_NE(request_digest(a), request_digest(text_request("hello", "other")));

  // Two requests differing only in image bytes get distinct digests.
  ModelRequest img1 = text_request("same");
  img1.messages[0].parts.push_back(MessagePart::make_image({1, 2, 3}));
  ModelRequest img2 = text_request("same");
  img2.messages[0].parts.push_back(MessagePart::make_image({1, 2, 4}));
  EXPECT_NE(request_digest(img1), request_digest(img2));
}

TEST(ScriptedBackend, FirstMatchingRuleWins) {
  BackendConfig cfg;
  cfg.name = "demo";
  cfg.kind = BackendKind::scripted;
  cfg.rules = {{"intersect", "yes"}, {"squares", "4"}};
  cfg.default_reply = "unknown";
  ScriptedBackend backend(cfg);

  EXPECT_EQ(backend.complete(text_request("Do the circles intersect?")).text,
            "yes");
  EXPECT_EQ(backend.complete(text_request("How many squares?")).text, "4");
  EXPECT_EQ(backend.complete(text_request("Hello there")).text, "unknown");
  EXPECT_EQ(backend.id(), "scripted:demo");
}

class CacheTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("geoprobe_cache_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(CacheTest, RecordThenReplayRoundTrip) {
  auto stats = std::make_shared<TransportStats>();
  BackendConfig cfg;
  cfg.name = "rec";
  cfg.kind = BackendKind::scripted;
  cfg.rules = {{"ping", "pong"}};
  cfg.cache_mode = CacheMode::record;
  cfg.cache_dir = dir_.string();

  auto recorder = make_backend(cfg, stats);
  ModelRequest req = text_request("ping me");
  EXPECT_EQ(recorder->complete(req).text, "pong");
  EXPECT_EQ(stats->cache_stores.load(), 1);
  // Second call hits the cache, not the scripted inner.
  EXPECT_EQ(recorder->complete(req).text, "pong");
  EXPECT_EQ(stats->cache_hits.load(), 1);

  // Entry lives at <cache>/<first2>/<digest>.json.
  std::string digest = request_digest(req);
  fs::path entry = dir_ / digest.substr(0, 2) / (digest + ".json");
  EXPECT_TRUE(fs::exists(entry));

  // A pure replay backend serves it with zero transport.
  BackendConfig replay_cfg;
  replay_cfg.name = "rp";
  replay_cfg.kind = BackendKind::replay;
  replay_cfg.cache_dir = dir_.string();
  auto replayer = make_backend(replay_cfg, stats);
  EXPECT_EQ(replayer->complete(req).text, "pong");
  EXPECT_EQ(stats->network_calls.load(), 0);
}

TEST_F(CacheTest, ReplayMissNamesTheDigest) {
  auto stats = std::make_shared<TransportStats>();
  BackendConfig cfg;
  cfg.name = "rp";
  cfg.kind = BackendKind::replay;
  cfg.cache_dir = dir_.string();
  auto backend = make_backend(cfg, stats);

  ModelRequest req = text_request("never recorded");
  try {
    backend->complete(req);
    FAIL() << "expected MissingCacheEntry";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::missing_cache_entry);
    EXPECT_EQ(e.digest(), request_digest(req));
    EXPECT_NE(std::string(e.what()).find(request_digest(req)),
              std::string::npos);
  }
}

TEST_F(CacheTest, CacheModeRequiresDir) {
  BackendConfig cfg;
  cfg.kind = BackendKind::scripted;
  cfg.cache_mode = CacheMode::record;
  EXPECT_THROW(make_backend(cfg, std::make_shared<TransportStats>()),
               BackendError);
}

TEST_F(CacheTest, RecordThenHermeticReplayOverManyRequests) {
  // Record against a scripted stand-in, then replay must be byte-identical
  // and perform zero network operations.
  auto stats = std::make_shared<TransportStats>();
  BackendConfig rec;
  rec.name = "stand-in";
  rec.kind = BackendKind::scripted;
  rec.default_reply = "recorded text";
  rec.cache_mode = CacheMode::record;
  rec.cache_dir = dir_.string();
  auto recorder = make_backend(rec, stats);

  std::vector<ModelRequest> reqs;
  for (int i = 0; i < 5; ++i)
    reqs.push_back(text_request("q" + std::to_string(i)));
  std::vector<std::string> first;
  for (const auto& r : reqs) first.push_back(recorder->complete(r).text);

  BackendConfig rp;
  rp.name = "rp";
  rp.kind = BackendKind::replay;
  rp.cache_dir = dir_.string();
  auto replayer = make_backend(rp, stats);
  for (size_t i = 0; i < reqs.size(); ++i)
    EXPECT_EQ(replayer->complete(reqs[i]).text, first[i]);
  EXPECT_EQ(stats->network_calls.load(), 0);
}

// --- HTTP behavior against a local server -----------------------------------

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    setenv("GEOPROBE_TEST_KEY", "secret-key", 1);
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    server_thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    server_thread_.join();
  }

  virtual void handle(const httplib::Request& req, httplib::Response& res) {
    requests_.push_back(req.body);
    last_auth_ = req.get_header_value("Authorization");
    ++calls_;
    if (calls_ <= fail_first_n_) {
      res.status = fail_status_;
      res.set_content("overloaded", "text/plain");
      return;
    }
    nlohmann::json body = {
        {"choices",
         {{{"message", {{"role", "assistant"}, {"content", reply_}}},
           {"finish_reason", "stop"}}}},
        {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 3}}}};
    res.set_content(body.dump(), "application/json");
  }

  BackendConfig http_config() {
    BackendConfig cfg;
    cfg.name = "local";
    cfg.kind = BackendKind::http_openai_compatible;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    cfg.api_key_env = "GEOPROBE_TEST_KEY";
    cfg.model_id = "unit-model";
    cfg.max_retries = 3;
    cfg.timeout_s = 5;
    return cfg;
  }

  httplib::Server server_;
  std::thread server_thread_;
  int port_ = 0;
  int calls_ = 0;
  int fail_first_n_ = 0;
  int fail_status_ = 500;
  std::string reply_ = "hello from server";
  std::string last_auth_;
  std::vector<std::string> requests_;
};

TEST_F(HttpTest, SuccessfulCompletion) {
  auto stats = std::make_shared<TransportStats>();
  HttpBackend backend(http_config(), stats);
  ModelRequest req = text_request("hi", "unit-model");
  req.messages[0].parts.push_back(MessagePart::make_image({9, 9, 9}));
  ModelResponse resp = backend.complete(req);
  EXPECT_EQ(resp.text, "hello from server");
  EXPECT_EQ(resp.finish_reason, FinishReason::stop);
  ASSERT_TRUE(resp.usage.has_value());
  EXPECT_EQ(resp.usage->prompt, 10);
  EXPECT_EQ(stats->network_calls.load(), 1);
  EXPECT_EQ(last_auth_, "Bearer secret-key");

  // Wire shape: model, messages with text and data-URL image parts.
  ASSERT_EQ(requests_.size(), 1u);
  nlohmann::json sent = nlohmann::json::parse(requests_[0]);
  EXPECT_EQ(sent.at("model"), "unit-model");
  EXPECT_EQ(sent.at("messages")[0].at("content")[0].at("type"), "text");
  std::string url = sent.at("messages")[0]
                        .at("content")[1]
                        .at("image_url")
                        .at("url")
                        .get<std::string>();
  EXPECT_EQ(url.rfind("data:image/png;base64,", 0), 0u);
}

TEST_F(HttpTest, RetriesTransientFailuresWithBackoff) {
  fail_first_n_ = 2;
  fail_status_ = 429;
  auto stats = std::make_shared<TransportStats>();
  std::vector<int> sleeps;
  HttpBackend backend(http_config(), stats,
                      [&](int ms) { sleeps.push_back(ms); });
  ModelResponse resp = backend.complete(text_request("retry me"));
  EXPECT_EQ(resp.text, "hello from server");
  EXPECT_EQ(calls_, 3);
  ASSERT_EQ(sleeps.size(), 2u);
  // Base 1s, factor 2, jitter +/-25%.
  EXPECT_GE(sleeps[0], 750);
  EXPECT_LE(sleeps[0], 1250);
  EXPECT_GE(sleeps[1], 1500);
  EXPECT_LE(sleeps[1], 2500);
}

TEST_F(HttpTest, ExhaustsRetriesThenFails) {
  fail_first_n_ = 100;
  fail_status_ = 503;
  auto stats = std::make_shared<TransportStats>();
  BackendConfig cfg = http_config();
  cfg.max_retries = 2;
  HttpBackend backend(cfg, stats, [](int) {});
  try {
    backend.complete(text_request("doomed"));
    FAIL() << "expected ExhaustedRetries";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::exhausted_retries);
  }
  // Total attempts = 1 + max_retries.
  EXPECT_EQ(calls_, 3);
}

TEST_F(HttpTest, AuthErrorNeverRetries) {
  fail_first_n_ = 100;
  fail_status_ = 401;
  HttpBackend backend(http_config(), std::make_shared<TransportStats>(),
                      [](int) { FAIL() << "must not sleep on auth error"; });
  try {
    backend.complete(text_request("denied"));
    FAIL() << "expected AuthError";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::auth);
  }
  EXPECT_EQ(calls_, 1);
}

TEST_F(HttpTest, MissingEnvVarFailsFast) {
  BackendConfig cfg = http_config();
  cfg.api_key_env = "GEOPROBE_DEFINITELY_UNSET";
  unsetenv("GEOPROBE_DEFINITELY_UNSET");
  HttpBackend backend(cfg, std::make_shared<TransportStats>());
  try {
    backend.complete(text_request("x"));
    FAIL() << "expected auth error";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::auth);
    EXPECT_NE(std::string(e.what()).find("GEOPROBE_DEFINITELY_UNSET"),
              std::string::npos);
  }
  EXPECT_EQ(calls_, 0);
}

class MalformedHttpTest : public HttpTest {
 protected:
  void handle(const httplib::Request&, httplib::Response& res) override {
    ++calls_;
    res.set_content("this is not json", "application/json");
  }
};

TEST_F(MalformedHttpTest, UnparseableBodyIsMalformedResponse) {
  HttpBackend backend(http_config(), std::make_shared<TransportStats>());
  try {
    backend.complete(text_request("x"));
    FAIL() << "expected MalformedResponse";
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::malformed_response);
  }
}

}  // namespace
}  // namespace geoprobe
