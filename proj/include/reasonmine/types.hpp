#pragma once

// Shared domain types for the mining / filtering / distillation pipeline.
// Everything here is plain data: no I/O, no backend access.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reasonmine {

enum class Dataset { StrategyQA, CommonsenseQA };

std::string_view to_string(Dataset d);
std::optional<Dataset> parse_dataset(std::string_view name);

struct Choice {
  std::string letter;
  std::string text;

  bool operator==(const Choice &) const = default;
};

struct QAInstance {
  std::string id;
  std::string question;
  std::string answer;  // canonical gold label: "yes"/"no" or "A".."E"
  std::optional<std::vector<Choice>> choices;
  Dataset dataset = Dataset::StrategyQA;

  bool operator==(const QAInstance &) const = default;
};

/// Sampling parameters for latent-path mining. Defaults follow the reference
/// setup: top-5 first tokens, 5 samples per token, nucleus p=0.95, top-k 10.
struct SamplingConfig {
  int branch_k = 5;
  int samples_per_branch = 5;
  double top_p = 0.95;
  int top_k = 10;
  double temperature = 1.0;
  int max_new_tokens = 256;
  std::optional<std::int64_t> seed;

  int candidates_per_question() const { return branch_k * samples_per_branch; }

  bool operator==(const SamplingConfig &) const = default;
};

enum class FinishReason { Length, Stop };

std::string_view to_string(FinishReason r);
std::optional<FinishReason> parse_finish_reason(std::string_view s);

struct Candidate {
  std::string question_id;
  int branch_index = 0;
  int sample_index = 0;
  std::string branch_token;
  std::string text;  // includes the branch token
  std::vector<std::string> tokens;
  std::vector<double> token_logprobs;  // natural log
  FinishReason finish_reason = FinishReason::Stop;

  bool operator==(const Candidate &) const = default;
};

struct FilterOutcome {
  std::string question_id;
  int branch_index = 0;
  int sample_index = 0;
  int token_count = 0;
  bool pattern_pass = false;
  bool length_pass = false;
  double rep2 = 0.0;
  bool rep2_pass = false;
  double perplexity = 1.0;
  bool ppl_pass = false;
  bool selected = false;

  bool passes_all() const { return pattern_pass && length_pass && rep2_pass && ppl_pass; }

  bool operator==(const FilterOutcome &) const = default;
};

enum class RecordKind { SelfTrain, Distill };

std::string_view to_string(RecordKind k);
std::optional<RecordKind> parse_record_kind(std::string_view s);

struct TrainingRecord {
  RecordKind kind = RecordKind::SelfTrain;
  std::string question_id;
  std::string text;
  std::string reasoning;
  std::string answer;

  bool operator==(const TrainingRecord &) const = default;
};

struct JudgeScores {
  double coherence = 0.0;
  double relevance = 0.0;
  double logical_consistency = 0.0;
  double completeness = 0.0;
  double average = 0.0;

  static JudgeScores from_criteria(double coherence, double relevance,
                                   double logical_consistency, double completeness);

  bool operator==(const JudgeScores &) const = default;
};

enum class HistogramMode { PerOutput, PerQuestionAny };

std::string_view to_string(HistogramMode m);
std::optional<HistogramMode> parse_histogram_mode(std::string_view s);

struct Histogram {
  static constexpr std::array<double, 6> bin_edges{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  std::array<double, 5> values{};
  HistogramMode mode = HistogramMode::PerOutput;

  bool operator==(const Histogram &) const = default;
};

/// Question text as shown to models. CommonsenseQA items append their options
/// as " Answer Choices: (A) ... (E) ..."; StrategyQA questions pass through.
std::string prompt_question(const QAInstance &instance);

// Invariant checks. Each returns the list of violated invariants, empty when valid.
std::vector<std::string> validate(const QAInstance &instance);
std::vector<std::string> validate(const SamplingConfig &cfg);
std::vector<std::string> validate(const Candidate &candidate);
std::vector<std::string> validate(const FilterOutcome &outcome);
std::vector<std::string> validate(const TrainingRecord &record);
std::vector<std::string> validate(const JudgeScores &scores);
std::vector<std::string> validate(const Histogram &histogram);

}  // namespace reasonmine
