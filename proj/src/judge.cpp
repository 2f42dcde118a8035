#include "reasonmine/judge.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "reasonmine/tokenize.hpp"

namespace reasonmine::judge {

namespace {

constexpr std::string_view kPromptHead =
    "Please evaluate the reasoning provided by a single method in response to the following "
    "question. Your task is to assess the quality of reasoning based on the criteria provided "
    "below and calculate the average score.\n"
    "Question: \"";

constexpr std::string_view kPromptMiddle = "\"\nResponse: \"";

constexpr std::string_view kPromptTail =
    "\"\n"
    "Evaluation Instructions: Carefully evaluate the reasoning quality of the response based on "
    "the following criteria and provide a score from 0 (lowest) to 10 (highest) for each. Each "
    "score should be presented in a specified format for easy extraction:\n"
    "1. Coherence: How logically consistent and easily understandable is the reasoning in the "
    "response?\n"
    "   - Score for Coherence: [Insert score here]\n"
    "2. Relevance: How relevant are the reasoning steps to answering the given question?\n"
    "   - Score for Relevance: [Insert score here]\n"
    "3. Logical Consistency: Are there any logical fallacies or contradictions in the reasoning "
    "provided?\n"
    "   - Score for Logical Consistency: [Insert score here]\n"
    "4. Completeness: Does the response address all parts of the question and provide a thorough "
    "reasoning process?\n"
    "   - Score for Completeness: [Insert score here]\n"
    "Please ensure that each score is clearly indicated following the phrases provided above. "
    "This will assist in the subsequent extraction and analysis of the data.\n"
    "Summarize the overall effectiveness of the reasoning based on these scores in a brief "
    "concluding statement.";

constexpr std::size_t kWindow = 40;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

// First number in the window after a label. The window ends early at a line
// break that follows other words, so an echoed "[Insert score here]" line
// cannot borrow the next line's list number.
std::optional<double> number_after(std::string_view reply, std::size_t from) {
  const auto window = reply.substr(from, kWindow);
  bool seen_word = false;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const char c = window[i];
    if (c == '\n' && seen_word) return std::nullopt;
    if (is_alpha(c)) {
      seen_word = true;
      continue;
    }
    if (!is_digit(c)) continue;
    std::size_t j = i;
    while (j < window.size() && is_digit(window[j])) ++j;
    if (j + 1 < window.size() && window[j] == '.' && is_digit(window[j + 1])) {
      ++j;
      while (j < window.size() && is_digit(window[j])) ++j;
    }
    double v = 0.0;
    const auto num = window.substr(i, j - i);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc{}) return std::nullopt;
    return v;
  }
  return std::nullopt;
}

}  // namespace

std::string render_judge_prompt(std::string_view question, std::string_view completion) {
  std::string out;
  out.reserve(kPromptHead.size() + question.size() + kPromptMiddle.size() + completion.size() +
              kPromptTail.size());
  out += kPromptHead;
  out += question;
  out += kPromptMiddle;
  out += completion;
  out += kPromptTail;
  return out;
}

ParsedJudge parse_judge(std::string_view reply) {
  const auto lower = to_lower(reply);
  std::array<double, 4> values{};
  ParsedJudge parsed;
  for (std::size_t c = 0; c < kCriteria.size(); ++c) {
    const auto label = to_lower("Score for " + std::string(kCriteria[c]));
    std::optional<double> found;
    for (auto pos = lower.find(label); pos != std::string::npos && !found;
         pos = lower.find(label, pos + 1))
      found = number_after(reply, pos + label.size());
    if (!found) throw JudgeParseError(std::string(reply));
    double v = *found;
    if (v > 10.0 || v < 0.0) {
      parsed.warnings.push_back("clamped " + std::string(kCriteria[c]) + " score " +
                                std::to_string(v));
      v = std::clamp(v, 0.0, 10.0);
    }
    values[c] = v;
  }
  parsed.scores = JudgeScores::from_criteria(values[0], values[1], values[2], values[3]);
  return parsed;
}

JudgeOutcome score(Backend &judge, std::string_view question, std::string_view completion,
                   double temperature) {
  const auto prompt = render_judge_prompt(question, completion);
  JudgeOutcome outcome;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ++outcome.attempts;
    try {
      const auto reply = judge.chat(prompt, ChatParams{temperature, attempt});
      auto parsed = parse_judge(reply);
      outcome.scores = parsed.scores;
      for (auto &w : parsed.warnings) outcome.warnings.push_back(std::move(w));
      return outcome;
    } catch (const JudgeParseError &e) {
      outcome.warnings.push_back("unparseable judge reply (attempt " + std::to_string(attempt + 1) +
                                 "): " + e.raw.substr(0, 200));
    } catch (const BackendError &e) {
      outcome.warnings.push_back(std::string("judge request failed: ") + e.what());
      return outcome;
    }
  }
  return outcome;
}

}  // namespace reasonmine::judge
