#pragma once

// Stage orchestration over a run directory.
//
//   run/manifest.json       one entry per completed stage
//   run/instances.jsonl     ingest
//   run/candidates.jsonl    mine
//   run/outcomes.jsonl      filter
//   run/selftrain.jsonl     build-selftrain
//   run/teacher.jsonl       harvest-teacher
//   run/distill.jsonl       build-distill
//   run/eval.jsonl          evaluate
//   run/judge.jsonl         judge
//   run/report/             report
//
// Each stage reads its predecessors' artifacts and records
// {stage, input hashes, config hash, timestamp} in the manifest. A stage whose
// inputs, config and outputs are unchanged is skipped.

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reasonmine/backend.hpp"
#include "reasonmine/caching_backend.hpp"
#include "reasonmine/dataset_builder.hpp"
#include "reasonmine/evaluator.hpp"
#include "reasonmine/filter_cascade.hpp"
#include "reasonmine/types.hpp"

namespace reasonmine {

enum class Stage {
  Ingest,
  Mine,
  Filter,
  BuildSelfTrain,
  HarvestTeacher,
  BuildDistill,
  Evaluate,
  Judge,
  Report,
};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view name);
const std::vector<Stage> &all_stages();

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  // ingest
  Dataset dataset = Dataset::StrategyQA;
  std::string input;  // dataset file
  std::string split = "train";
  int limit = 0;      // 0 = all instances

  // mine / filter
  SamplingConfig sampling;
  int probe_margin = 1;
  filter::Thresholds thresholds;

  // dataset builder
  bool unicode_apostrophe = false;
  int teacher_max_tokens = 256;
  double teacher_temperature = 0.0;

  // evaluate
  eval::FmtConfig fmt;
  std::string completions;           // optional completions JSONL; generated when empty
  std::string eval_prompt = "plain"; // "plain" or "cot" for generated completions

  // judge
  double judge_temperature = 0.0;
  std::string judge_target = "all";  // "eval", "candidates" or "all"

  std::size_t max_inflight = 8;
};

nlohmann::json to_json(const PipelineConfig &cfg);

struct Backends {
  Backend *student = nullptr;
  Backend *teacher = nullptr;
  Backend *judge = nullptr;
};

enum class StageStatus { Ran, UpToDate };

struct StageResult {
  Stage stage;
  StageStatus status;
  std::vector<std::string> warnings;
};

class Pipeline {
 public:
  /// cache_dir defaults to <run_dir>/cache.
  Pipeline(std::filesystem::path run_dir, PipelineConfig cfg, Backends backends,
           std::filesystem::path cache_dir = {});

  /// Throws PipelineError when a predecessor is missing ("requires stage: mine")
  /// or when the stage already ran with a different config and force is false.
  StageResult run(Stage stage, bool force = false);

  /// Runs every stage whose backend is available, in dependency order.
  std::vector<StageResult> run_all(bool force = false);

  /// Requests forwarded past the response cache.
  std::size_t backend_requests() const;

  const std::filesystem::path &run_dir() const { return run_dir_; }
  std::filesystem::path artifact(std::string_view name) const { return run_dir_ / name; }
  nlohmann::json manifest() const;

 private:
  struct Plan {
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;
    nlohmann::json config;
  };

  Plan plan(Stage stage) const;
  void require(Stage stage) const;
  bool completed(Stage stage) const;
  Backend &backend_for(Stage stage);

  std::vector<std::string> do_ingest();
  std::vector<std::string> do_mine();
  std::vector<std::string> do_filter();
  std::vector<std::string> do_build_selftrain();
  std::vector<std::string> do_harvest_teacher();
  std::vector<std::string> do_build_distill();
  std::vector<std::string> do_evaluate();
  std::vector<std::string> do_judge();
  std::vector<std::string> do_report();

  void write_manifest(const nlohmann::json &m) const;

  std::filesystem::path run_dir_;
  PipelineConfig cfg_;
  Backends raw_;
  std::unique_ptr<ResponseCache> cache_;
  std::unique_ptr<CachingBackend> student_;
  std::unique_ptr<CachingBackend> teacher_;
  std::unique_ptr<CachingBackend> judge_;
};

}  // namespace reasonmine
