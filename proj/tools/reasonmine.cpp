#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "reasonmine/http_backend.hpp"
#include "reasonmine/log.hpp"
#include "reasonmine/mock_backend.hpp"
#include "reasonmine/pipeline.hpp"

using namespace reasonmine;

namespace {

struct Endpoint {
  std::string url;
  std::string model;
  std::string api_key;
};

std::unique_ptr<Backend> make_backend(const Endpoint &ep, bool mock, const std::string &role,
                                      std::uint64_t seed, int logprob_limit, std::size_t inflight) {
  if (mock) return std::make_unique<MockBackend>(role, seed);
  if (ep.url.empty()) return nullptr;
  EndpointConfig cfg;
  cfg.base_url = ep.url;
  cfg.model = ep.model;
  cfg.api_key = ep.api_key;
  cfg.logprob_limit = logprob_limit;
  cfg.max_inflight = static_cast<int>(inflight);
  return std::make_unique<HttpBackend>(std::move(cfg));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Latent reasoning mining, filtering and evaluation pipeline"};
  app.set_config("--config", "", "key = value config file (TOML/INI)");
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string run_dir = "run";
  std::string cache_dir;
  std::string dataset = "strategyqa";
  Endpoint student, teacher, judge;
  bool mock = false;
  bool force = false;
  std::int64_t seed = 0;
  bool seed_given = false;
  int logprob_limit = 20;
  bool verbose = false;
  bool quiet = false;

  app.add_option("--run-dir", run_dir, "Run directory holding artifacts and the manifest");
  app.add_option("--cache-dir", cache_dir, "Response cache directory (default <run-dir>/cache)");
  app.add_option("--dataset", dataset, "strategyqa or commonsenseqa");
  app.add_option("--input", cfg.input, "Dataset file for ingest");
  app.add_option("--split", cfg.split, "Dataset split name");
  app.add_option("--limit", cfg.limit, "Keep only the first N instances (0 = all)");

  app.add_option("--branch-k", cfg.sampling.branch_k);
  app.add_option("--samples-per-branch", cfg.sampling.samples_per_branch);
  app.add_option("--top-p", cfg.sampling.top_p);
  app.add_option("--top-k", cfg.sampling.top_k);
  app.add_option("--temperature", cfg.sampling.temperature);
  app.add_option("--max-new-tokens", cfg.sampling.max_new_tokens);
  app.add_option("--probe-margin", cfg.probe_margin, "Extra first-token alternatives for EOS skipping");
  app.add_option("--seed", seed, "Sampling seed; also seeds --mock backends")
      ->each([&](const std::string &) { seed_given = true; });

  app.add_option("--min-tokens", cfg.thresholds.min_tokens);
  app.add_option("--max-rep2", cfg.thresholds.max_rep2);
  app.add_option("--min-ppl", cfg.thresholds.min_ppl);

  app.add_flag("--unicode-apostrophe", cfg.unicode_apostrophe,
               "Use U+2019 in \"Let's think step by step\"");
  app.add_option("--teacher-max-tokens", cfg.teacher_max_tokens);

  app.add_option("--completions", cfg.completions, "Completions JSONL to evaluate");
  app.add_option("--eval-prompt", cfg.eval_prompt, "plain or cot, for generated completions")
      ->check(CLI::IsMember({"plain", "cot"}));
  app.add_option("--eval-max-new-tokens", cfg.fmt.max_new_tokens);
  app.add_option("--judge-target", cfg.judge_target)->check(CLI::IsMember({"eval", "candidates", "all"}));
  app.add_option("--judge-temperature", cfg.judge_temperature);

  app.add_option("--backend-url", student.url, "Student endpoint base URL")->envname("REASONMINE_BACKEND_URL");
  app.add_option("--backend-model", student.model)->envname("REASONMINE_BACKEND_MODEL");
  app.add_option("--teacher-url", teacher.url)->envname("REASONMINE_TEACHER_URL");
  app.add_option("--teacher-model", teacher.model)->envname("REASONMINE_TEACHER_MODEL");
  app.add_option("--judge-url", judge.url)->envname("REASONMINE_JUDGE_URL");
  app.add_option("--judge-model", judge.model)->envname("REASONMINE_JUDGE_MODEL");
  app.add_option("--logprob-limit", logprob_limit, "Largest logprobs count the student serves");
  app.add_option("--max-inflight", cfg.max_inflight, "Concurrent requests per backend");
  app.add_flag("--mock", mock, "Use deterministic offline backends");
  app.add_flag("--force", force, "Rerun stages even if up to date or configured differently");
  app.add_flag("-v,--verbose", verbose);
  app.add_flag("-q,--quiet", quiet);

  // API keys come from the environment only.
  if (const char *k = std::getenv("REASONMINE_API_KEY")) student.api_key = teacher.api_key = judge.api_key = k;
  if (const char *k = std::getenv("REASONMINE_TEACHER_API_KEY")) teacher.api_key = k;
  if (const char *k = std::getenv("REASONMINE_JUDGE_API_KEY")) judge.api_key = k;

  std::vector<std::pair<CLI::App *, std::optional<Stage>>> commands;
  for (auto stage : all_stages()) {
    auto *sub = app.add_subcommand(std::string(to_string(stage)));
    sub->fallthrough();
    commands.emplace_back(sub, stage);
  }
  auto *all = app.add_subcommand("all", "Run every stage whose backend is configured");
  all->fallthrough();
  commands.emplace_back(all, std::nullopt);

  CLI11_PARSE(app, argc, argv);

  if (verbose) log::set_level(log::Level::Debug);
  if (quiet) log::set_level(log::Level::Error);

  auto ds = parse_dataset(dataset);
  if (!ds) {
    std::cerr << "unknown dataset: " << dataset << "\n";
    return 2;
  }
  cfg.dataset = *ds;
  if (seed_given) cfg.sampling.seed = seed;

  const auto mock_seed = static_cast<std::uint64_t>(seed);
  auto s = make_backend(student, mock, "student", mock_seed, logprob_limit, cfg.max_inflight);
  auto t = make_backend(teacher, mock, "teacher", mock_seed, logprob_limit, cfg.max_inflight);
  auto j = make_backend(judge, mock, "judge", mock_seed, logprob_limit, cfg.max_inflight);

  try {
    Pipeline pipeline(run_dir, cfg, {s.get(), t.get(), j.get()}, cache_dir);
    std::vector<StageResult> results;
    for (auto &[sub, stage] : commands) {
      if (!sub->parsed()) continue;
      if (stage)
        results.push_back(pipeline.run(*stage, force));
      else
        results = pipeline.run_all(force);
    }
    for (const auto &r : results) {
      std::cout << to_string(r.stage) << ": "
                << (r.status == StageStatus::Ran ? "ran" : "up to date");
      if (!r.warnings.empty()) std::cout << " (" << r.warnings.size() << " warnings)";
      std::cout << "\n";
    }
    std::cout << "backend requests: " << pipeline.backend_requests() << "\n";
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
