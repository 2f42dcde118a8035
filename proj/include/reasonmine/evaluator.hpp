#pragma once

// Task metrics for model outputs: accuracy (Acc), output format alignment
// (Fmt), reasoning length (Len) and unigram repetition (Rep), plus score
// histograms.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reasonmine/types.hpp"

namespace reasonmine::eval {

/// Label following the last "the answer is" marker (case-insensitive).
/// StrategyQA: yes/no, lowercased. CommonsenseQA: a standalone letter A–E,
/// optionally parenthesized, or the exact text of one of `choices`.
std::optional<std::string> extract_answer(std::string_view completion, Dataset dataset,
                                          std::span<const Choice> choices = {});

/// Byte offset where the final answer sentence starts: the last "the answer is"
/// marker, widened to include a directly preceding "So ". npos when absent.
std::size_t answer_marker_offset(std::string_view completion);

/// Tokens ending at or before the answer marker; all tokens when there is no
/// marker. When tokens do not concatenate to the completion, the completion is
/// re-split into word pieces first.
std::vector<std::string> reasoning_span(std::string_view completion,
                                        std::span<const std::string> tokens);

struct FmtConfig {
  double max_unigram_rep = 0.8;
  int max_new_tokens = 256;
  int budget_factor = 2;  // token_count must not exceed budget_factor * max_new_tokens

  bool operator==(const FmtConfig &) const = default;
};

struct FmtResult {
  bool parsed = false;
  bool repetition_ok = false;
  bool length_ok = false;

  bool ok() const { return parsed && repetition_ok && length_ok; }
};

FmtResult fmt_check(std::string_view completion, std::span<const std::string> tokens,
                    Dataset dataset, std::span<const Choice> choices = {},
                    const FmtConfig &cfg = {});

struct ItemResult {
  std::string question_id;
  std::string gold;
  std::optional<std::string> predicted;
  FmtResult fmt;
  int span_length = 0;
  double span_rep = 0.0;

  bool correct() const { return predicted && *predicted == gold; }
};

/// Scores one completion against its instance.
ItemResult evaluate_item(const QAInstance &instance, std::string_view completion,
                         std::span<const std::string> tokens, const FmtConfig &cfg = {});

struct Summary {
  double acc = 0.0;
  double fmt = 0.0;
  double len = 0.0;
  double rep = 0.0;
  std::size_t n = 0;
};

/// Throws std::invalid_argument on empty input.
Summary aggregate(std::span<const ItemResult> items);

struct ScoredOutput {
  std::string question_id;
  double score = 0.0;
};

/// Bin index for a 0–10 score: [0,2) [2,4) [4,6) [6,8) [8,10].
int score_bin(double score);

Histogram histogram(std::span<const ScoredOutput> scores, HistogramMode mode);

}  // namespace reasonmine::eval
