#pragma once

// Four-stage latent-path filter: structured-format imitation, minimum length,
// bigram repetition, minimum perplexity; then one survivor per question.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reasonmine/types.hpp"

namespace reasonmine::filter {

struct Thresholds {
  int min_tokens = 25;    // reject < min_tokens
  double max_rep2 = 0.20; // reject > max_rep2
  double min_ppl = 5.0;   // reject < min_ppl

  bool operator==(const Thresholds &) const = default;
};

/// Slack applied to the real-valued boundaries so values that equal a
/// threshold up to floating-point rounding land on the accepting side.
inline constexpr double kBoundaryTolerance = 1e-9;

/// True when text imitates a new QA pair: a "Question:" marker followed later
/// by an "Answer:" marker.
bool imitates_qa_format(std::string_view text);

/// All four stage verdicts, always computed. selected is false.
FilterOutcome stage_verdicts(const Candidate &c, const Thresholds &th = {});

/// Among outcomes passing every stage, the one with minimal rep2; ties go to
/// the smallest (branch_index, sample_index). Returned copy has selected=true.
std::optional<FilterOutcome> select_best(std::span<const FilterOutcome> outcomes);

struct CascadeResult {
  std::vector<FilterOutcome> outcomes;            // input order, selected flags set
  std::map<std::string, Candidate> selected;      // question_id -> chosen candidate
};

CascadeResult run_cascade(std::span<const Candidate> candidates, const Thresholds &th = {});

}  // namespace reasonmine::filter
