#pragma once

// LLM-as-judge protocol: the four-criterion evaluation prompt and parsing of
// the judge's scores out of free-form replies.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reasonmine/backend.hpp"
#include "reasonmine/types.hpp"

namespace reasonmine::judge {

inline constexpr std::array<std::string_view, 4> kCriteria{"Coherence", "Relevance",
                                                           "Logical Consistency", "Completeness"};

/// The evaluation prompt with the question and completion inserted literally.
std::string render_judge_prompt(std::string_view question, std::string_view completion);

struct JudgeParseError : std::runtime_error {
  explicit JudgeParseError(std::string raw_reply)
      : std::runtime_error("unparseable judge reply"), raw(std::move(raw_reply)) {}
  std::string raw;
};

struct ParsedJudge {
  JudgeScores scores;
  std::vector<std::string> warnings;  // clamped values
};

/// Finds "Score for <Criterion>" for each criterion and reads the first number
/// in the following 40 characters ("[8]", ": 8", "**8**" all work). Values are
/// clamped to [0,10]. Throws JudgeParseError when any criterion is missing.
ParsedJudge parse_judge(std::string_view reply);

struct JudgeOutcome {
  std::optional<JudgeScores> scores;  // absent = unscored
  std::vector<std::string> warnings;
  int attempts = 0;
};

/// Sends the prompt, parses, and on an unparseable reply retries once with a
/// fresh call. Transport failures leave the item unscored.
JudgeOutcome score(Backend &judge, std::string_view question, std::string_view completion,
                   double temperature = 0.0);

}  // namespace reasonmine::judge
