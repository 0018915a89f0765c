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
// Command-line entry point: generate datasets, run model evaluations,
// verify ground truth, and render reports.
//
// Exit codes: 0 ok, 1 fatal error, 2 degraded run (>50% of traces errored).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "geoprobe/backend.hpp"
#include "geoprobe/generators.hpp"
#include "geoprobe/pipeline.hpp"
#include "geoprobe/report.hpp"

namespace fs = std::filesystem;
using namespace geoprobe;

namespace {

struct CliConfig {
  std::map<std::string, BackendConfig> backends;
  GeneratorConfig generator;
  // run block
  std::string label;
  RunMode mode = RunMode::both;
  std::string direct_backend, keyword_backend, caption_backend, answer_backend;
  int max_concurrency = 4;
};

CliConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  CliConfig cfg;
  if (j.contains("backends")) {
    for (const auto& [name, spec] : j.at("backends").items())
      cfg.backends[name] = backend_config_from_json(name, spec);
  }
  if (j.contains("generator")) {
    const nlohmann::json& g = j.at("generator");
    cfg.generator.instances_per_task =
        g.value("instances_per_task", cfg.generator.instances_per_task);
    cfg.generator.master_seed = g.value("master_seed", cfg.generator.master_seed);
    cfg.generator.canvas_width =
        g.value("canvas_width", cfg.generator.canvas_width);
    cfg.generator.canvas_height =
        g.value("canvas_height", cfg.generator.canvas_height);
    if (g.contains("tasks"))
      cfg.generator.tasks = g.at("tasks").get<std::vector<int>>();
  }
  if (j.contains("run")) {
    const nlohmann::json& r = j.at("run");
    cfg.label = r.value("label", "");
    if (r.contains("mode")) cfg.mode = run_mode_from_name(r.at("mode"));
    cfg.direct_backend = r.value("direct_backend", "");
    cfg.keyword_backend = r.value("keyword_backend", "");
    cfg.caption_backend = r.value("caption_backend", "");
    cfg.answer_backend = r.value("answer_backend", "");
    cfg.max_concurrency = r.value("max_concurrency", 4);
  }
  return cfg;
}

std::shared_ptr<Backend> resolve_backend(const CliConfig& cfg,
                                         const std::string& name,
                                         const std::string& stage,
                                         std::shared_ptr<TransportStats> stats) {
  if (name.empty())
    throw BackendError(BackendErrorKind::config,
                       "run config does not name a backend for stage '" +
                           stage + "'");
  auto it = cfg.backends.find(name);
  if (it == cfg.backends.end())
    throw BackendError(BackendErrorKind::config,
                       "backend '" + name + "' (stage '" + stage +
                           "') is not defined in the config");
  // Secrets only ever come from the named environment variable; fail fast
  // when it is missing so a long run cannot die halfway through.
  if (it->second.kind == BackendKind::http_openai_compatible) {
    if (it->second.api_key_env.empty())
      throw BackendError(BackendErrorKind::config,
                         "backend '" + name + "': api_key_env is required");
    const char* v = std::getenv(it->second.api_key_env.c_str());
    if (!v || !*v)
      throw BackendError(BackendErrorKind::auth,
                         "environment variable " + it->second.api_key_env +
                             " is not set (backend '" + name + "')");
  }
  return std::shared_ptr<Backend>(make_backend(it->second, std::move(stats)));
}

std::vector<int> parse_task_list(const std::string& arg) {
  std::vector<int> tasks;
  std::string token;
  for (char c : arg + ",") {
    if (c == ',') {
      if (!token.empty()) tasks.push_back(std::stoi(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  for (int t : tasks)
    if (t < 1 || t > 8)
      throw std::invalid_argument("task ids must lie in 1..8, got " +
                                  std::to_string(t));
  return tasks;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 const std::string& tasks_arg, int n, int64_t seed, int jobs) {
  GeneratorConfig gen;
  if (!config_path.empty()) gen = load_config(config_path).generator;
  if (!tasks_arg.empty()) gen.tasks = parse_task_list(tasks_arg);
  if (n > 0) gen.instances_per_task = n;
  if (seed >= 0) gen.master_seed = static_cast<uint64_t>(seed);

  std::vector<TaskInstance> manifest =
      generate_dataset(gen, out_dir, std::max(1, jobs));
  std::map<int, int> per_task;
  for (const TaskInstance& inst : manifest) per_task[inst.task_id]++;
  std::printf("wrote %s\n", (fs::path(out_dir) / "manifest.jsonl").c_str());
  for (const auto& [task, count] : per_task)
    std::printf("  task %d: %d instances\n", task, count);
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& dataset_dir,
            const std::string& mode_arg, const std::string& out_dir,
            int max_concurrency) {
  CliConfig cfg = load_config(config_path);
  RunConfig run;
  run.mode = mode_arg.empty() ? cfg.mode : run_mode_from_name(mode_arg);
  run.max_concurrency =
      max_concurrency > 0 ? max_concurrency : cfg.max_concurrency;
  run.label = cfg.label;

  BackendSet backends;
  backends.stats = std::make_shared<TransportStats>();
  const bool want_direct = run.mode != RunMode::captioned;
  const bool want_captioned = run.mode != RunMode::direct;
  if (want_direct)
    backends.direct =
        resolve_backend(cfg, cfg.direct_backend, "direct", backends.stats);
  if (want_captioned) {
    backends.keyword =
        resolve_backend(cfg, cfg.keyword_backend, "keywords", backends.stats);
    backends.caption =
        resolve_backend(cfg, cfg.caption_backend, "caption", backends.stats);
    backends.answer =
        resolve_backend(cfg, cfg.answer_backend, "answer", backends.stats);
  }
  if (run.label.empty()) {
    run.label = want_direct ? backends.direct->model_id()
                            : backends.caption->model_id();
    if (run.label.empty()) run.label = "model";
  }

  std::vector<TaskInstance> manifest =
      load_manifest(fs::path(dataset_dir) / "manifest.jsonl");
  RunResult result = run_dataset(manifest, dataset_dir, run, backends, out_dir);

  std::printf("wrote %s (%zu traces, %d errors)\n",
              (fs::path(out_dir) / "traces.jsonl").c_str(),
              result.traces.size(), result.errors);

  std::vector<std::string> missing_digests;
  for (const PipelineTrace& t : result.traces) {
    if (t.error && t.error->kind == "missing_cache_entry")
      missing_digests.push_back(t.error->message);
  }
  if (!missing_digests.empty()) {
    std::fprintf(stderr, "replay misses (%zu):\n", missing_digests.size());
    for (const std::string& m : missing_digests)
      std::fprintf(stderr, "  %s\n", m.c_str());
    return 1;
  }
  if (result.errors * 2 > static_cast<int>(result.traces.size())) {
    std::fprintf(stderr, "degraded run: %d of %zu traces errored\n",
                 result.errors, result.traces.size());
    return 2;
  }
  return 0;
}

int cmd_evaluate(const std::vector<std::string>& run_dirs,
                 const std::string& manifest_path, const std::string& format,
                 std::string out_dir) {
  std::vector<TaskInstance> manifest = load_manifest(manifest_path);
  EvalTable table;
  std::map<std::string, std::vector<PairedComparison>> significance;
  for (const std::string& run_dir : run_dirs) {
    std::vector<PipelineTrace> traces =
        load_traces(fs::path(run_dir) / "traces.jsonl");
    std::string label = "model";
    {
      std::ifstream meta_in(fs::path(run_dir) / "run_meta.json");
      if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
        if (!meta.is_discarded()) label = meta.value("label", label);
      }
    }
    std::vector<ScoredTrace> scored = score(manifest, traces);
    table.rows.push_back(aggregate(scored, label));

    bool has_direct = false, has_captioned = false;
    for (const ScoredTrace& s : scored) {
      has_direct |= s.trace.mode == "direct";
      has_captioned |= s.trace.mode == "captioned";
    }
    if (has_direct && has_captioned)
      significance[label] = compare_modes(scored);
  }

  ReportFormat fmt = ReportFormat::markdown;
  std::string ext = "md";
  if (format == "json") {
    fmt = ReportFormat::json;
    ext = "json";
  } else if (format == "csv") {
    fmt = ReportFormat::csv;
    ext = "csv";
  } else if (format != "markdown" && !format.empty()) {
    throw std::invalid_argument("unknown format '" + format + "'");
  }
  if (out_dir.empty()) out_dir = run_dirs.front();
  fs::create_directories(out_dir);
  fs::path out_path = fs::path(out_dir) / ("report." + ext);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path.string());
  out << render_report(table, significance, fmt);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_verify(const std::string& dataset_dir) {
  VerifyReport report = verify_dataset(dataset_dir);
  if (report.ok()) {
    std::printf("verified %d instances, all ground truths reproduced\n",
                report.checked);
    return 0;
  }
  std::fprintf(stderr, "verification failed (%zu problems):\n",
               report.mismatches.size());
  for (const std::string& m : report.mismatches)
    std::fprintf(stderr, "  %s\n", m.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geoprobe: procedural geometry benchmarks for vision-language "
               "models"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a benchmark dataset");
  std::string gen_config, gen_out, gen_tasks;
  int gen_n = 0, gen_jobs = 1;
  int64_t gen_seed = -1;
  gen->add_option("--config", gen_config, "Config JSON (generator block)");
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--tasks", gen_tasks, "Comma-separated task ids (default all)");
  gen->add_option("--n", gen_n, "Instances per task");
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--jobs", gen_jobs, "Worker threads (output is identical)");

  auto* run = app.add_subcommand("run", "Run model evaluation over a dataset");
  std::string run_config, run_dataset_dir, run_mode, run_out;
  int run_concurrency = 0;
  run->add_option("--config", run_config, "Config JSON")->required();
  run->add_option("--dataset", run_dataset_dir, "Dataset directory")->required();
  run->add_option("--mode", run_mode, "direct | captioned | both");
  run->add_option("--out", run_out, "Run output directory")->required();
  run->add_option("--max-concurrency", run_concurrency, "Worker threads");

  auto* eval = app.add_subcommand("evaluate", "Score runs and render reports");
  std::vector<std::string> eval_runs;
  std::string eval_manifest, eval_format = "markdown", eval_out;
  eval->add_option("--run", eval_runs, "Run directory (repeatable)")->required();
  eval->add_option("--manifest", eval_manifest, "Dataset manifest.jsonl")
      ->required();
  eval->add_option("--format", eval_format, "markdown | json | csv");
  eval->add_option("--out", eval_out, "Report output directory");

  auto* verify = app.add_subcommand(
      "verify", "Recompute every ground truth from stored scenes");
  std::string verify_dataset_dir;
  verify->add_option("--dataset", verify_dataset_dir, "Dataset directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_config, gen_out, gen_tasks, gen_n, gen_seed,
                          gen_jobs);
    if (run->parsed())
      return cmd_run(run_config, run_dataset_dir, run_mode, run_out,
                     run_concurrency);
    if (eval->parsed())
      return cmd_evaluate(eval_runs, eval_manifest, eval_format, eval_out);
    if (verify->parsed()) return cmd_verify(verify_dataset_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
