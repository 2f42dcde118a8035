#include "reasonmine/types.hpp"

#include <cmath>
#include <numeric>

namespace reasonmine {

std::string_view to_string(Dataset d) {
  switch (d) {
    case Dataset::StrategyQA: return "strategyqa";
    case Dataset::CommonsenseQA: return "commonsenseqa";
  }
  return "unknown";
}

std::optional<Dataset> parse_dataset(std::string_view name) {
  if (name == "strategyqa") return Dataset::StrategyQA;
  if (name == "commonsenseqa") return Dataset::CommonsenseQA;
  return std::nullopt;
}

std::string_view to_string(FinishReason r) {
  return r == FinishReason::Length ? "length" : "stop";
}

std::optional<FinishReason> parse_finish_reason(std::string_view s) {
  if (s == "length") return FinishReason::Length;
  if (s == "stop") return FinishReason::Stop;
  return std::nullopt;
}

std::string_view to_string(RecordKind k) {
  return k == RecordKind::SelfTrain ? "self_train" : "distill";
}

std::optional<RecordKind> parse_record_kind(std::string_view s) {
  if (s == "self_train") return RecordKind::SelfTrain;
  if (s == "distill") return RecordKind::Distill;
  return std::nullopt;
}

std::string_view to_string(HistogramMode m) {
  return m == HistogramMode::PerOutput ? "per_output" : "per_question_any";
}

std::optional<HistogramMode> parse_histogram_mode(std::string_view s) {
  if (s == "per_output") return HistogramMode::PerOutput;
  if (s == "per_question_any") return HistogramMode::PerQuestionAny;
  return std::nullopt;
}

JudgeScores JudgeScores::from_criteria(double coherence, double relevance,
                                       double logical_consistency, double completeness) {
  JudgeScores s{coherence, relevance, logical_consistency, completeness, 0.0};
  s.average = (coherence + relevance + logical_consistency + completeness) / 4.0;
  return s;
}

std::string prompt_question(const QAInstance &instance) {
  if (!instance.choices || instance.choices->empty()) return instance.question;
  std::string out = instance.question + " Answer Choices:";
  for (const auto &c : *instance.choices) out += " (" + c.letter + ") " + c.text;
  return out;
}

namespace {

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }
bool in_score_range(double v) { return v >= 0.0 && v <= 10.0; }

}  // namespace

std::vector<std::string> validate(const QAInstance &instance) {
  std::vector<std::string> out;
  if (instance.id.empty()) out.emplace_back("empty id");
  if (instance.question.empty()) out.emplace_back("empty question");

  if (instance.dataset == Dataset::CommonsenseQA) {
    if (!instance.choices || instance.choices->size() != 5) {
      out.emplace_back("choices≠5");
    } else {
      static constexpr std::string_view letters = "ABCDE";
      for (std::size_t i = 0; i < 5; ++i) {
        if ((*instance.choices)[i].letter != std::string(1, letters[i])) {
          out.emplace_back("choice letters not A–E in order");
          break;
        }
      }
    }
    if (instance.answer.size() != 1 || instance.answer[0] < 'A' || instance.answer[0] > 'E')
      out.emplace_back("label∉{A..E}");
  } else {
    if (instance.choices) out.emplace_back("choices present for StrategyQA");
    if (instance.answer != "yes" && instance.answer != "no") out.emplace_back("label∉{yes,no}");
  }
  return out;
}

std::vector<std::string> validate(const SamplingConfig &cfg) {
  std::vector<std::string> out;
  if (cfg.branch_k < 1) out.emplace_back("branch_k < 1");
  if (cfg.samples_per_branch < 1) out.emplace_back("samples_per_branch < 1");
  if (!(cfg.top_p > 0.0 && cfg.top_p <= 1.0)) out.emplace_back("top_p ∉ (0,1]");
  if (cfg.top_k < 1) out.emplace_back("top_k < 1");
  if (!(cfg.temperature >= 0.0)) out.emplace_back("temperature < 0");
  if (cfg.max_new_tokens < 1) out.emplace_back("max_new_tokens < 1");
  return out;
}

std::vector<std::string> validate(const Candidate &candidate) {
  std::vector<std::string> out;
  if (candidate.question_id.empty()) out.emplace_back("empty question_id");
  if (candidate.branch_index < 0) out.emplace_back("negative branch_index");
  if (candidate.sample_index < 0) out.emplace_back("negative sample_index");
  if (candidate.tokens.empty()) out.emplace_back("no tokens");
  if (candidate.tokens.size() != candidate.token_logprobs.size())
    out.emplace_back("tokens/logprobs length mismatch");
  for (double lp : candidate.token_logprobs) {
    if (!(lp <= 0.0)) {
      out.emplace_back("logprob > 0");
      break;
    }
  }
  const std::string joined =
      std::accumulate(candidate.tokens.begin(), candidate.tokens.end(), std::string{});
  if (joined != candidate.text) out.emplace_back("tokens do not concatenate to text");
  if (candidate.text.compare(0, candidate.branch_token.size(), candidate.branch_token) != 0)
    out.emplace_back("text does not begin with branch_token");
  return out;
}

std::vector<std::string> validate(const FilterOutcome &outcome) {
  std::vector<std::string> out;
  if (!in_unit_range(outcome.rep2)) out.emplace_back("rep2 ∉ [0,1]");
  if (!(outcome.perplexity >= 1.0)) out.emplace_back("perplexity < 1");
  if (outcome.selected && !outcome.passes_all()) out.emplace_back("selected without passing all stages");
  return out;
}

std::vector<std::string> validate(const TrainingRecord &record) {
  std::vector<std::string> out;
  const std::string suffix = "So the answer is " + record.answer;
  if (record.text.size() < suffix.size() ||
      record.text.compare(record.text.size() - suffix.size(), suffix.size(), suffix) != 0)
    out.emplace_back("text does not end with answer sentence");
  if (record.reasoning.empty()) out.emplace_back("empty reasoning");
  if (record.question_id.empty()) out.emplace_back("empty question_id");
  return out;
}

std::vector<std::string> validate(const JudgeScores &scores) {
  std::vector<std::string> out;
  for (double v : {scores.coherence, scores.relevance, scores.logical_consistency,
                   scores.completeness, scores.average}) {
    if (!in_score_range(v)) {
      out.emplace_back("score ∉ [0,10]");
      break;
    }
  }
  const double mean = (scores.coherence + scores.relevance + scores.logical_consistency +
                       scores.completeness) / 4.0;
  if (std::abs(mean - scores.average) > 1e-9) out.emplace_back("average ≠ mean of criteria");
  return out;
}

std::vector<std::string> validate(const Histogram &histogram) {
  std::vector<std::string> out;
  double sum = 0.0;
  for (double v : histogram.values) {
    if (!in_unit_range(v)) out.emplace_back("bin value ∉ [0,1]");
    sum += v;
  }
  if (histogram.mode == HistogramMode::PerOutput && sum != 0.0 && std::abs(sum - 1.0) > 1e-9)
    out.emplace_back("per_output values do not sum to 1");
  return out;
}

}  // namespace reasonmine
