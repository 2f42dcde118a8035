#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reasonmine/evaluator.hpp"
#include "reasonmine/types.hpp"

namespace reasonmine::report {

/// Cumulative filter configurations, from unfiltered to the full cascade.
inline constexpr std::array<std::string_view, 5> kAblationStages{
    "raw", "+pattern", "+length", "+repetition", "+perplexity"};

/// True when the outcome survives every filter up to and including `stage`
/// (an index into kAblationStages).
bool survives(const FilterOutcome &o, std::size_t stage);

struct JudgeRow {
  std::string target;  // "eval" or "candidate"
  std::string question_id;
  int branch_index = -1;
  int sample_index = -1;
  std::optional<JudgeScores> scores;
};

/// Published reference numbers (student GPT-2 sizes and the teacher). Acc is
/// a percentage; Fmt/Len/Rep are absent where the table has no value.
struct ReferenceRow {
  std::string_view model;
  std::string_view method;
  Dataset dataset;
  double acc;
  std::optional<double> fmt;
  std::optional<double> len;
  std::optional<double> rep;
};

const std::vector<ReferenceRow> &reference_rows();

struct Inputs {
  Dataset dataset = Dataset::StrategyQA;
  std::optional<std::vector<eval::ItemResult>> eval;
  std::optional<std::vector<JudgeRow>> judge;
  std::optional<std::vector<FilterOutcome>> outcomes;
};

/// Bar chart of one histogram as a standalone SVG document.
std::string render_svg(const Histogram &h, std::string_view title);

/// Report files keyed by relative file name. Output is a pure function of the inputs.
std::map<std::string, std::string> build(const Inputs &in);

}  // namespace reasonmine::report
