#pragma once

// A four-question StrategyQA run with fully scripted student, teacher and
// judge backends. Every request the pipeline makes has a scripted answer, so
// no output depends on the mock's fallback generator.

#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reasonmine/branch_sampler.hpp"
#include "reasonmine/dataset_builder.hpp"
#include "reasonmine/judge.hpp"
#include "reasonmine/mock_backend.hpp"
#include "reasonmine/pipeline.hpp"
#include "reasonmine/serialize.hpp"
#include "reasonmine/tokenize.hpp"

namespace fixture {

using namespace reasonmine;

inline std::vector<QAInstance> questions() {
  return {
      {"sq0", "Do fish sleep?", "yes", std::nullopt, Dataset::StrategyQA},
      {"sq1", "Is lava colder than ice?", "no", std::nullopt, Dataset::StrategyQA},
      {"sq2", "Can a penguin fly to the moon?", "no", std::nullopt, Dataset::StrategyQA},
      {"sq3", "Would a cat fit in a shoebox?", "yes", std::nullopt, Dataset::StrategyQA},
  };
}

// StrategyQA-layout file for the four questions.
inline void write_dataset(const std::filesystem::path &path) {
  json rows = json::array();
  for (const auto &q : questions())
    rows.push_back({{"qid", q.id}, {"question", q.question}, {"answer", q.answer == "yes"}, {"facts", json::array()}});
  write_file(path, rows.dump(1));
}

inline const std::vector<std::string> &branch_tokens() {
  static const std::vector<std::string> t{" Because", " The", " Well", " First", " It"};
  return t;
}

// Continuation text for (question, branch, sample). Samples 0..4 exercise the
// filters: too short, QA imitation, clean, repetitive, clean.
inline std::string continuation(int q, int b, int s) {
  const std::string tag = "q" + std::to_string(q) + "b" + std::to_string(b);
  std::string t;
  switch (s) {
    case 0: return " yes.";
    case 1: return " it is. Question: Is snow white? Answer: yes";
    case 3:
      for (int i = 0; i < 12; ++i) t += " and so on";
      return t;
    default:
      for (int i = 0; i < 30 + s + b; ++i) t += " " + tag + "w" + std::to_string(i);
      if (s == 4) t += " " + tag + "w0 " + tag + "w1";  // one repeated bigram
      return t + ". So the answer is " + (q % 2 ? "no" : "yes");
  }
}

inline std::string eval_completion(int q) {
  static const std::vector<std::string> outs{
      " Fish rest with their eyes open at night. So the answer is yes",
      " Lava is molten rock and very hot. So the answer is yes",
      " Penguins cannot fly at all. So the answer is no",
      " cat cat cat cat cat cat cat cat cat cat",
  };
  return outs.at(static_cast<std::size_t>(q));
}

inline std::string teacher_reasoning(int q) {
  return "The question asks about item " + std::to_string(q) + ". Thinking it through gives a clear result.";
}

struct Backends {
  MockBackend student{"student", 1};
  MockBackend teacher{"teacher", 2};
  MockBackend judge{"judge", 3};

  explicit Backends(const SamplingConfig &cfg = {}) {
    const auto qs = questions();
    for (int q = 0; q < static_cast<int>(qs.size()); ++q) {
      const auto prompt = sampler::render_mining_prompt(qs[q].question);
      std::vector<TokenLogprob> topk;
      for (int b = 0; b < 5; ++b) topk.push_back({branch_tokens()[b], -0.5 - 0.25 * b});
      student.script_topk(prompt, topk);
      for (int b = 0; b < cfg.branch_k; ++b) {
        std::vector<Completion> samples;
        for (int s = 0; s < cfg.samples_per_branch; ++s) {
          const auto text = continuation(q, b, s);
          samples.push_back(MockBackend::make_completion(text, s == 3 ? -0.2 : -2.0));
          judge.script_chat(judge::render_judge_prompt(qs[q].question, trim(branch_tokens()[b] + text)),
                            {oracle::judge_reply((q + b + s) % 11, 5, 6, (b * s) % 11, q + s)});
        }
        student.script_completions(prompt + branch_tokens()[b], samples);
      }
      student.script_completions(prompt, {MockBackend::make_completion(eval_completion(q), -1.0)}, 1);
      judge.script_chat(judge::render_judge_prompt(qs[q].question, eval_completion(q)),
                        {oracle::judge_reply(2 * q + 1, 2 * q + 2, 7, 8, q)});

      teacher.script_texts(dataset::render_teacher_prompt(qs[q].question), {" " + teacher_reasoning(q) + " "});
    }
  }

  std::size_t calls() const { return student.calls() + teacher.calls() + judge.calls(); }
  reasonmine::Backends ptrs() { return {&student, &teacher, &judge}; }
};

inline PipelineConfig config(const std::filesystem::path &dataset_path) {
  PipelineConfig cfg;
  cfg.input = dataset_path.string();
  cfg.split = "train";
  cfg.max_inflight = 4;
  return cfg;
}

inline const std::vector<std::string> &artifact_names() {
  static const std::vector<std::string> names{
      "manifest.json",   "instances.jsonl", "candidates.jsonl", "outcomes.jsonl", "selftrain.jsonl",
      "teacher.jsonl",   "distill.jsonl",   "eval.jsonl",       "judge.jsonl",    "report/metrics.csv",
      "report/metrics.md", "report/ablation.csv", "report/histograms.csv", "report/judge.csv",
      "report/report.md"};
  return names;
}

// Every file under dir (relative path -> bytes), skipping the response cache.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), dir).generic_string();
    if (rel.rfind("cache/", 0) == 0) continue;
    out[rel] = read_file(e.path());
  }
  return out;
}

}  // namespace fixture
