#include "reasonmine/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <map>

#include "reasonmine/branch_sampler.hpp"
#include "reasonmine/hashing.hpp"
#include "reasonmine/ingestion.hpp"
#include "reasonmine/judge.hpp"
#include "reasonmine/log.hpp"
#include "reasonmine/parallel.hpp"
#include "reasonmine/report.hpp"
#include "reasonmine/serialize.hpp"
#include "reasonmine/tokenize.hpp"

namespace reasonmine {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kInstances = "instances.jsonl";
constexpr std::string_view kCandidates = "candidates.jsonl";
constexpr std::string_view kOutcomes = "outcomes.jsonl";
constexpr std::string_view kSelfTrain = "selftrain.jsonl";
constexpr std::string_view kTeacher = "teacher.jsonl";
constexpr std::string_view kDistill = "distill.jsonl";
constexpr std::string_view kEval = "eval.jsonl";
constexpr std::string_view kJudge = "judge.jsonl";
constexpr std::string_view kReportDir = "report";
constexpr std::string_view kManifest = "manifest.json";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Hash of a file, or of every file under a directory (relative path + hash).
std::string hash_path(const fs::path &p) {
  if (fs::is_directory(p)) {
    std::map<std::string, std::string> entries;
    for (const auto &e : fs::recursive_directory_iterator(p))
      if (e.is_regular_file()) entries[fs::relative(e.path(), p).generic_string()] = sha256_file(e.path());
    return sha256_hex(json(entries).dump());
  }
  return sha256_file(p);
}

std::map<std::string, QAInstance> index_instances(const std::vector<QAInstance> &instances) {
  std::map<std::string, QAInstance> out;
  for (const auto &i : instances) out.emplace(i.id, i);
  return out;
}

json eval_record(const eval::ItemResult &r, const std::string &completion,
                 const std::vector<std::string> &tokens) {
  return json{{"question_id", r.question_id},
              {"gold", r.gold},
              {"predicted", r.predicted ? json(*r.predicted) : json(nullptr)},
              {"correct", r.correct()},
              {"fmt_parsed", r.fmt.parsed},
              {"fmt_repetition_ok", r.fmt.repetition_ok},
              {"fmt_length_ok", r.fmt.length_ok},
              {"fmt_ok", r.fmt.ok()},
              {"span_length", r.span_length},
              {"span_rep", r.span_rep},
              {"completion", completion},
              {"tokens", tokens}};
}

eval::ItemResult eval_item_from(const json &j) {
  eval::ItemResult r;
  j.at("question_id").get_to(r.question_id);
  j.at("gold").get_to(r.gold);
  if (!j.at("predicted").is_null()) r.predicted = j.at("predicted").get<std::string>();
  j.at("fmt_parsed").get_to(r.fmt.parsed);
  j.at("fmt_repetition_ok").get_to(r.fmt.repetition_ok);
  j.at("fmt_length_ok").get_to(r.fmt.length_ok);
  j.at("span_length").get_to(r.span_length);
  j.at("span_rep").get_to(r.span_rep);
  return r;
}

report::JudgeRow judge_row_from(const json &j) {
  report::JudgeRow r;
  j.at("target").get_to(r.target);
  j.at("question_id").get_to(r.question_id);
  r.branch_index = j.value("branch_index", -1);
  r.sample_index = j.value("sample_index", -1);
  if (!j.at("scores").is_null()) r.scores = j.at("scores").get<JudgeScores>();
  return r;
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Mine: return "mine";
    case Stage::Filter: return "filter";
    case Stage::BuildSelfTrain: return "build-selftrain";
    case Stage::HarvestTeacher: return "harvest-teacher";
    case Stage::BuildDistill: return "build-distill";
    case Stage::Evaluate: return "evaluate";
    case Stage::Judge: return "judge";
    case Stage::Report: return "report";
  }
  return "unknown";
}

const std::vector<Stage> &all_stages() {
  static const std::vector<Stage> stages{Stage::Ingest,         Stage::Mine,
                                         Stage::Filter,         Stage::BuildSelfTrain,
                                         Stage::HarvestTeacher, Stage::BuildDistill,
                                         Stage::Evaluate,       Stage::Judge,
                                         Stage::Report};
  return stages;
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : all_stages())
    if (to_string(s) == name) return s;
  return std::nullopt;
}

json to_json(const PipelineConfig &cfg) {
  return json{{"dataset", to_string(cfg.dataset)},
              {"input", cfg.input},
              {"split", cfg.split},
              {"limit", cfg.limit},
              {"sampling", cfg.sampling},
              {"probe_margin", cfg.probe_margin},
              {"min_tokens", cfg.thresholds.min_tokens},
              {"max_rep2", cfg.thresholds.max_rep2},
              {"min_ppl", cfg.thresholds.min_ppl},
              {"unicode_apostrophe", cfg.unicode_apostrophe},
              {"teacher_max_tokens", cfg.teacher_max_tokens},
              {"teacher_temperature", cfg.teacher_temperature},
              {"fmt_max_unigram_rep", cfg.fmt.max_unigram_rep},
              {"eval_max_new_tokens", cfg.fmt.max_new_tokens},
              {"fmt_budget_factor", cfg.fmt.budget_factor},
              {"completions", cfg.completions},
              {"eval_prompt", cfg.eval_prompt},
              {"judge_temperature", cfg.judge_temperature},
              {"judge_target", cfg.judge_target}};
}

Pipeline::Pipeline(fs::path run_dir, PipelineConfig cfg, Backends backends, fs::path cache_dir)
    : run_dir_(std::move(run_dir)), cfg_(std::move(cfg)), raw_(backends) {
  fs::create_directories(run_dir_);
  if (cache_dir.empty()) cache_dir = run_dir_ / "cache";
  cache_ = std::make_unique<ResponseCache>(cache_dir);
  if (raw_.student) student_ = std::make_unique<CachingBackend>(*raw_.student, *cache_);
  if (raw_.teacher) teacher_ = std::make_unique<CachingBackend>(*raw_.teacher, *cache_);
  if (raw_.judge) judge_ = std::make_unique<CachingBackend>(*raw_.judge, *cache_);
}

std::size_t Pipeline::backend_requests() const {
  std::size_t n = 0;
  for (const auto *b : {student_.get(), teacher_.get(), judge_.get()})
    if (b) n += b->misses();
  return n;
}

json Pipeline::manifest() const {
  const auto path = run_dir_ / kManifest;
  if (!fs::exists(path)) return json{{"stages", json::object()}};
  return json::parse(read_file(path));
}

void Pipeline::write_manifest(const json &m) const {
  write_file(run_dir_ / kManifest, m.dump(2) + "\n");
}

bool Pipeline::completed(Stage stage) const {
  const auto m = manifest();
  return m.at("stages").contains(std::string(to_string(stage)));
}

Backend &Pipeline::backend_for(Stage stage) {
  CachingBackend *b = nullptr;
  const char *role = "student";
  switch (stage) {
    case Stage::HarvestTeacher:
      b = teacher_.get();
      role = "teacher";
      break;
    case Stage::Judge:
      b = judge_.get();
      role = "judge";
      break;
    default:
      b = student_.get();
  }
  if (!b) throw PipelineError(std::string("stage ") + std::string(to_string(stage)) + " needs a " +
                              role + " backend");
  return *b;
}

void Pipeline::require(Stage stage) const {
  auto need = [&](Stage s) {
    if (!completed(s)) throw PipelineError("requires stage: " + std::string(to_string(s)));
  };
  switch (stage) {
    case Stage::Ingest: break;
    case Stage::Mine: need(Stage::Ingest); break;
    case Stage::Filter: need(Stage::Mine); break;
    case Stage::BuildSelfTrain: need(Stage::Filter); break;
    case Stage::HarvestTeacher: need(Stage::Ingest); break;
    case Stage::BuildDistill: need(Stage::HarvestTeacher); break;
    case Stage::Evaluate: need(Stage::Ingest); break;
    case Stage::Judge:
      need(Stage::Ingest);
      if (!completed(Stage::Evaluate) && !completed(Stage::Mine))
        throw PipelineError("requires stage: evaluate or mine");
      break;
    case Stage::Report:
      if (!completed(Stage::Evaluate) && !completed(Stage::Judge))
        throw PipelineError("requires stage: evaluate or judge");
      break;
  }
}

Pipeline::Plan Pipeline::plan(Stage stage) const {
  Plan p;
  const auto full = to_json(cfg_);
  auto pick = [&](std::initializer_list<const char *> keys) {
    json sub = json::object();
    for (const char *k : keys) sub[k] = full.at(k);
    return sub;
  };
  auto identity = [](const std::unique_ptr<CachingBackend> &b) {
    return b ? json(b->identity()) : json(nullptr);
  };
  auto art = [&](std::string_view name) { return run_dir_ / name; };

  switch (stage) {
    case Stage::Ingest:
      p.inputs = {fs::path(cfg_.input)};
      p.outputs = {art(kInstances)};
      p.config = pick({"dataset", "split", "limit"});
      break;
    case Stage::Mine:
      p.inputs = {art(kInstances)};
      p.outputs = {art(kCandidates)};
      p.config = pick({"sampling", "probe_margin"});
      p.config["student"] = identity(student_);
      break;
    case Stage::Filter:
      p.inputs = {art(kCandidates)};
      p.outputs = {art(kOutcomes)};
      p.config = pick({"min_tokens", "max_rep2", "min_ppl"});
      break;
    case Stage::BuildSelfTrain:
      p.inputs = {art(kInstances), art(kCandidates), art(kOutcomes)};
      p.outputs = {art(kSelfTrain)};
      p.config = json::object();
      break;
    case Stage::HarvestTeacher:
      p.inputs = {art(kInstances)};
      p.outputs = {art(kTeacher)};
      p.config = pick({"teacher_max_tokens", "teacher_temperature", "unicode_apostrophe"});
      p.config["teacher"] = identity(teacher_);
      break;
    case Stage::BuildDistill:
      p.inputs = {art(kTeacher)};
      p.outputs = {art(kDistill)};
      p.config = pick({"unicode_apostrophe"});
      break;
    case Stage::Evaluate:
      p.inputs = {art(kInstances)};
      if (!cfg_.completions.empty()) p.inputs.emplace_back(cfg_.completions);
      p.outputs = {art(kEval)};
      p.config = pick({"fmt_max_unigram_rep", "eval_max_new_tokens", "fmt_budget_factor",
                       "completions", "eval_prompt"});
      if (cfg_.completions.empty()) p.config["student"] = identity(student_);
      break;
    case Stage::Judge:
      p.inputs = {art(kInstances)};
      for (auto name : {kEval, kCandidates})
        if (fs::exists(art(name))) p.inputs.push_back(art(name));
      p.outputs = {art(kJudge)};
      p.config = pick({"judge_temperature", "judge_target"});
      p.config["judge"] = identity(judge_);
      break;
    case Stage::Report:
      p.inputs = {art(kInstances)};
      for (auto name : {kOutcomes, kEval, kJudge})
        if (fs::exists(art(name))) p.inputs.push_back(art(name));
      p.outputs = {art(kReportDir)};
      p.config = pick({"dataset"});
      break;
  }
  return p;
}

StageResult Pipeline::run(Stage stage, bool force) {
  require(stage);
  const auto p = plan(stage);
  const std::string name(to_string(stage));

  json input_hashes = json::object();
  for (const auto &in : p.inputs) {
    if (!fs::exists(in)) throw PipelineError(name + ": missing input " + in.string());
    const auto key = in.parent_path() == run_dir_ ? in.filename().string() : in.string();
    input_hashes[key] = hash_path(in);
  }
  const auto config_hash = sha256_hex(p.config.dump());

  auto m = manifest();
  if (m.at("stages").contains(name)) {
    const auto &entry = m["stages"][name];
    if (entry.at("config_hash") != config_hash && !force)
      throw PipelineError("config conflict with existing manifest for stage " + name +
                          " (use --force to overwrite)");
    if (entry.at("config_hash") == config_hash && entry.at("input_hashes") == input_hashes &&
        !force) {
      bool outputs_intact = true;
      for (const auto &out : p.outputs) {
        const auto key = out.filename().string();
        if (!fs::exists(out) || !entry.at("output_hashes").contains(key) ||
            entry["output_hashes"][key] != hash_path(out)) {
          outputs_intact = false;
          break;
        }
      }
      if (outputs_intact) {
        log::info(name + ": up to date");
        return {stage, StageStatus::UpToDate, {}};
      }
    }
  }

  std::vector<std::string> warnings;
  switch (stage) {
    case Stage::Ingest: warnings = do_ingest(); break;
    case Stage::Mine: warnings = do_mine(); break;
    case Stage::Filter: warnings = do_filter(); break;
    case Stage::BuildSelfTrain: warnings = do_build_selftrain(); break;
    case Stage::HarvestTeacher: warnings = do_harvest_teacher(); break;
    case Stage::BuildDistill: warnings = do_build_distill(); break;
    case Stage::Evaluate: warnings = do_evaluate(); break;
    case Stage::Judge: warnings = do_judge(); break;
    case Stage::Report: warnings = do_report(); break;
  }
  for (const auto &w : warnings) log::warn(w);

  json output_hashes = json::object();
  for (const auto &out : p.outputs) output_hashes[out.filename().string()] = hash_path(out);

  m = manifest();
  m["stages"][name] = json{{"stage", name},
                           {"config", p.config},
                           {"config_hash", config_hash},
                           {"input_hashes", input_hashes},
                           {"output_hashes", output_hashes},
                           {"warnings", warnings},
                           {"timestamp", utc_timestamp()}};
  write_manifest(m);
  log::info(name + ": done");
  return {stage, StageStatus::Ran, std::move(warnings)};
}

std::vector<StageResult> Pipeline::run_all(bool force) {
  std::vector<StageResult> results;
  for (auto stage : all_stages()) {
    if (stage == Stage::HarvestTeacher || stage == Stage::BuildDistill) {
      if (!teacher_) continue;
    }
    if (stage == Stage::Judge && !judge_) continue;
    results.push_back(run(stage, force));
  }
  return results;
}

std::vector<std::string> Pipeline::do_ingest() {
  if (cfg_.input.empty()) throw PipelineError("ingest: no input file configured");
  auto loaded = ingest::load(cfg_.dataset, cfg_.input, cfg_.split);
  if (cfg_.limit > 0 && loaded.instances.size() > static_cast<std::size_t>(cfg_.limit))
    loaded.instances.resize(static_cast<std::size_t>(cfg_.limit));
  write_jsonl_from(artifact(kInstances), loaded.instances);
  return loaded.warnings;
}

std::vector<std::string> Pipeline::do_mine() {
  const auto instances = read_jsonl_as<QAInstance>(artifact(kInstances));
  auto &backend = backend_for(Stage::Mine);
  sampler::MineOptions opts;
  opts.probe_margin = cfg_.probe_margin;
  auto results = ordered_parallel_map(instances.size(), cfg_.max_inflight, [&](std::size_t i) {
    return sampler::mine(instances[i], cfg_.sampling, backend, opts);
  });

  std::vector<Candidate> all;
  std::vector<std::string> warnings;
  for (auto &r : results) {
    for (auto &c : r.candidates) all.push_back(std::move(c));
    for (auto &w : r.warnings) warnings.push_back(std::move(w));
  }
  write_jsonl_from(artifact(kCandidates), all);
  return warnings;
}

std::vector<std::string> Pipeline::do_filter() {
  const auto candidates = read_jsonl_as<Candidate>(artifact(kCandidates));
  const auto result = filter::run_cascade(candidates, cfg_.thresholds);
  write_jsonl_from(artifact(kOutcomes), result.outcomes);
  return {};
}

std::vector<std::string> Pipeline::do_build_selftrain() {
  const auto instances = index_instances(read_jsonl_as<QAInstance>(artifact(kInstances)));
  const auto candidates = read_jsonl_as<Candidate>(artifact(kCandidates));
  const auto outcomes = read_jsonl_as<FilterOutcome>(artifact(kOutcomes));

  std::vector<std::string> warnings;
  std::vector<TrainingRecord> records;
  for (std::size_t i = 0; i < outcomes.size() && i < candidates.size(); ++i) {
    if (!outcomes[i].selected) continue;
    const auto &c = candidates[i];
    auto inst = instances.find(c.question_id);
    if (inst == instances.end()) {
      warnings.push_back(c.question_id + ": selected candidate has no instance");
      continue;
    }
    try {
      records.push_back(dataset::render_self_train(prompt_question(inst->second), c.text,
                                                   inst->second.answer, c.question_id));
    } catch (const std::invalid_argument &e) {
      warnings.push_back(c.question_id + ": " + e.what());
    }
  }
  dataset::emit_jsonl(std::move(records), artifact(kSelfTrain));
  return warnings;
}

std::vector<std::string> Pipeline::do_harvest_teacher() {
  const auto instances = read_jsonl_as<QAInstance>(artifact(kInstances));
  dataset::HarvestOptions opts;
  opts.max_tokens = cfg_.teacher_max_tokens;
  opts.temperature = cfg_.teacher_temperature;
  opts.workers = cfg_.max_inflight;
  opts.render.unicode_apostrophe = cfg_.unicode_apostrophe;
  auto result = dataset::harvest_teacher(instances, backend_for(Stage::HarvestTeacher), opts);
  write_jsonl_from(artifact(kTeacher), result.records);
  return result.warnings;
}

std::vector<std::string> Pipeline::do_build_distill() {
  const auto teacher = read_jsonl_as<dataset::TeacherRecord>(artifact(kTeacher));
  dataset::RenderOptions opts{cfg_.unicode_apostrophe};
  std::vector<TrainingRecord> records;
  std::vector<std::string> warnings;
  for (const auto &t : teacher) {
    try {
      records.push_back(dataset::render_distill(t.question, t.reasoning, t.answer, t.question_id, opts));
    } catch (const std::invalid_argument &e) {
      warnings.push_back(t.question_id + ": " + e.what());
    }
  }
  dataset::emit_jsonl(std::move(records), artifact(kDistill));
  return warnings;
}

std::vector<std::string> Pipeline::do_evaluate() {
  const auto instances = read_jsonl_as<QAInstance>(artifact(kInstances));
  std::vector<std::string> warnings;

  struct Output {
    std::string completion;
    std::vector<std::string> tokens;
    bool ok = false;
  };
  std::vector<Output> outputs(instances.size());

  if (!cfg_.completions.empty()) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < instances.size(); ++i) pos.emplace(instances[i].id, i);
    for (const auto &row : read_jsonl(cfg_.completions)) {
      const auto qid = row.at("question_id").get<std::string>();
      auto it = pos.find(qid);
      if (it == pos.end()) {
        warnings.push_back(qid + ": completion for unknown question ignored");
        continue;
      }
      auto &out = outputs[it->second];
      out.completion = row.at("completion").get<std::string>();
      if (row.contains("tokens") && row["tokens"].is_array()) out.tokens = row["tokens"].get<std::vector<std::string>>();
      out.ok = true;
    }
  } else {
    auto &backend = backend_for(Stage::Evaluate);
    CompletionParams params;
    params.max_tokens = cfg_.fmt.max_new_tokens;
    params.temperature = 0.0;
    params.top_p = 1.0;
    std::vector<std::string> errors(instances.size());
    outputs = ordered_parallel_map(instances.size(), cfg_.max_inflight, [&](std::size_t i) {
      const auto q = prompt_question(instances[i]);
      const auto prompt = cfg_.eval_prompt == "cot"
                              ? dataset::render_teacher_prompt(q, {cfg_.unicode_apostrophe})
                              : sampler::render_mining_prompt(q);
      Output out;
      try {
        auto c = backend.complete(prompt, params, 1).at(0);
        out.completion = std::move(c.text);
        out.tokens = std::move(c.tokens);
        out.ok = true;
      } catch (const BackendError &e) {
        errors[i] = e.what();
      }
      return out;
    });
    for (std::size_t i = 0; i < instances.size(); ++i)
      if (!errors[i].empty()) warnings.push_back(instances[i].id + ": generation failed: " + errors[i]);
  }

  std::vector<json> rows;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!outputs[i].ok) {
      if (!cfg_.completions.empty()) warnings.push_back(instances[i].id + ": no completion");
      continue;
    }
    const auto item = eval::evaluate_item(instances[i], outputs[i].completion, outputs[i].tokens, cfg_.fmt);
    rows.push_back(eval_record(item, outputs[i].completion, outputs[i].tokens));
  }
  write_jsonl(artifact(kEval), rows);
  return warnings;
}

std::vector<std::string> Pipeline::do_judge() {
  const auto instances = index_instances(read_jsonl_as<QAInstance>(artifact(kInstances)));
  auto &backend = backend_for(Stage::Judge);

  struct Job {
    std::string target;
    std::string question_id;
    int branch_index = -1;
    int sample_index = -1;
    std::string completion;
  };
  std::vector<Job> jobs;
  const bool want_eval = cfg_.judge_target == "eval" || cfg_.judge_target == "all";
  const bool want_candidates = cfg_.judge_target == "candidates" || cfg_.judge_target == "all";
  if (!want_eval && !want_candidates)
    throw PipelineError("judge: unknown target " + cfg_.judge_target);

  if (want_eval && fs::exists(artifact(kEval)))
    for (const auto &row : read_jsonl(artifact(kEval)))
      jobs.push_back({"eval", row.at("question_id").get<std::string>(), -1, -1,
                      row.at("completion").get<std::string>()});
  if (want_candidates && fs::exists(artifact(kCandidates)))
    for (const auto &c : read_jsonl_as<Candidate>(artifact(kCandidates)))
      jobs.push_back({"candidate", c.question_id, c.branch_index, c.sample_index, trim(c.text)});

  auto outcomes = ordered_parallel_map(jobs.size(), cfg_.max_inflight, [&](std::size_t i) {
    const auto &job = jobs[i];
    auto inst = instances.find(job.question_id);
    const std::string question = inst == instances.end() ? "" : prompt_question(inst->second);
    return judge::score(backend, question, job.completion, cfg_.judge_temperature);
  });

  std::vector<json> rows;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto &job = jobs[i];
    const auto &o = outcomes[i];
    json row{{"target", job.target},
             {"question_id", job.question_id},
             {"scores", o.scores ? json(*o.scores) : json(nullptr)},
             {"attempts", o.attempts},
             {"warnings", o.warnings}};
    if (job.target == "candidate") {
      row["branch_index"] = job.branch_index;
      row["sample_index"] = job.sample_index;
    }
    rows.push_back(std::move(row));
    for (const auto &w : o.warnings) warnings.push_back(job.question_id + ": " + w);
  }
  write_jsonl(artifact(kJudge), rows);
  return warnings;
}

std::vector<std::string> Pipeline::do_report() {
  report::Inputs in;
  in.dataset = cfg_.dataset;
  const auto instances = read_jsonl_as<QAInstance>(artifact(kInstances));
  if (!instances.empty()) in.dataset = instances.front().dataset;

  if (fs::exists(artifact(kEval))) {
    std::vector<eval::ItemResult> items;
    for (const auto &row : read_jsonl(artifact(kEval))) items.push_back(eval_item_from(row));
    in.eval = std::move(items);
  }
  if (fs::exists(artifact(kJudge))) {
    std::vector<report::JudgeRow> rows;
    for (const auto &row : read_jsonl(artifact(kJudge))) rows.push_back(judge_row_from(row));
    in.judge = std::move(rows);
  }
  if (fs::exists(artifact(kOutcomes))) in.outcomes = read_jsonl_as<FilterOutcome>(artifact(kOutcomes));

  const auto dir = artifact(kReportDir);
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto &[name, content] : report::build(in)) write_file(dir / name, content);
  return {};
}

}  // namespace reasonmine
