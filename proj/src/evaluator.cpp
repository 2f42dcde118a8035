#include "reasonmine/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "reasonmine/text_metrics.hpp"
#include "reasonmine/tokenize.hpp"

namespace reasonmine::eval {

namespace {

constexpr std::string_view kMarker = "the answer is";

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t last_marker(std::string_view text) {
  const auto lower = to_lower(text);
  return lower.rfind(kMarker);
}

std::optional<std::string> parse_yes_no(std::string_view rest) {
  std::size_t i = 0;
  while (i < rest.size() && !is_alnum(rest[i])) ++i;
  std::size_t j = i;
  while (j < rest.size() && is_alnum(rest[j])) ++j;
  const auto word = to_lower(rest.substr(i, j - i));
  if (word == "yes" || word == "no") return word;
  return std::nullopt;
}

std::optional<std::string> parse_choice(std::string_view rest, std::span<const Choice> choices) {
  std::size_t i = 0;
  while (i < rest.size() && (is_space(rest[i]) || rest[i] == ':' || rest[i] == '"' || rest[i] == '*'))
    ++i;
  const auto tail = rest.substr(i);

  // Parenthesized letter, either case: "(B)" / "(b)".
  if (tail.size() >= 3 && tail[0] == '(' && tail[2] == ')') {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(tail[1])));
    if (up >= 'A' && up <= 'E') return std::string(1, up);
  }
  // Bare uppercase letter standing alone: "B", "B.", "B)".
  if (!tail.empty() && tail[0] >= 'A' && tail[0] <= 'E' && (tail.size() == 1 || !is_alnum(tail[1])))
    return std::string(1, tail[0]);

  // Exact choice text, case-insensitive, not followed by more word characters.
  const auto lower_tail = to_lower(tail);
  const Choice *best = nullptr;
  for (const auto &c : choices) {
    const auto t = to_lower(trim(c.text));
    if (t.empty() || !lower_tail.starts_with(t)) continue;
    if (lower_tail.size() > t.size() && is_alnum(lower_tail[t.size()])) continue;
    if (!best || t.size() > trim(best->text).size()) best = &c;
  }
  if (best) return best->letter;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_answer(std::string_view completion, Dataset dataset,
                                          std::span<const Choice> choices) {
  const auto pos = last_marker(completion);
  if (pos == std::string::npos) return std::nullopt;
  const auto rest = completion.substr(pos + kMarker.size());
  return dataset == Dataset::StrategyQA ? parse_yes_no(rest) : parse_choice(rest, choices);
}

std::size_t answer_marker_offset(std::string_view completion) {
  const auto pos = last_marker(completion);
  if (pos == std::string::npos) return std::string_view::npos;
  std::size_t start = pos;
  std::size_t i = pos;
  while (i > 0 && is_space(completion[i - 1])) --i;
  if (i >= 2 && to_lower(completion.substr(i - 2, 2)) == "so" && (i == 2 || !is_alnum(completion[i - 3])))
    start = i - 2;
  return start;
}

std::vector<std::string> reasoning_span(std::string_view completion,
                                        std::span<const std::string> tokens) {
  std::vector<std::string> pieces;
  const std::string joined = std::accumulate(tokens.begin(), tokens.end(), std::string{});
  if (joined == completion) {
    pieces.assign(tokens.begin(), tokens.end());
  } else {
    pieces = word_pieces(completion);
  }

  const auto cut = answer_marker_offset(completion);
  if (cut == std::string_view::npos) return pieces;

  std::vector<std::string> out;
  std::size_t end = 0;
  for (auto &p : pieces) {
    end += p.size();
    if (end > cut) break;
    out.push_back(std::move(p));
  }
  return out;
}

FmtResult fmt_check(std::string_view completion, std::span<const std::string> tokens,
                    Dataset dataset, std::span<const Choice> choices, const FmtConfig &cfg) {
  std::vector<std::string> own;
  if (tokens.empty() && !completion.empty()) {
    own = word_pieces(completion);
    tokens = own;
  }
  FmtResult r;
  r.parsed = extract_answer(completion, dataset, choices).has_value();
  r.repetition_ok = metrics::unigram_rep(tokens) <= cfg.max_unigram_rep;
  r.length_ok = static_cast<long>(tokens.size()) <=
                static_cast<long>(cfg.budget_factor) * static_cast<long>(cfg.max_new_tokens);
  return r;
}

ItemResult evaluate_item(const QAInstance &instance, std::string_view completion,
                         std::span<const std::string> tokens, const FmtConfig &cfg) {
  std::span<const Choice> choices;
  if (instance.choices) choices = *instance.choices;

  ItemResult r;
  r.question_id = instance.id;
  r.gold = instance.answer;
  r.predicted = extract_answer(completion, instance.dataset, choices);
  r.fmt = fmt_check(completion, tokens, instance.dataset, choices, cfg);
  const auto span = reasoning_span(completion, tokens);
  r.span_length = static_cast<int>(span.size());
  r.span_rep = metrics::unigram_rep(span);
  return r;
}

Summary aggregate(std::span<const ItemResult> items) {
  if (items.empty()) throw std::invalid_argument("aggregate: no items");
  Summary s;
  s.n = items.size();
  double correct = 0, fmt = 0, len = 0, rep = 0;
  for (const auto &it : items) {
    correct += it.correct() ? 1.0 : 0.0;
    fmt += it.fmt.ok() ? 1.0 : 0.0;
    len += it.span_length;
    rep += it.span_rep;
  }
  const auto n = static_cast<double>(items.size());
  s.acc = correct / n;
  s.fmt = fmt / n;
  s.len = len / n;
  s.rep = rep / n;
  return s;
}

int score_bin(double score) {
  if (!(score >= 0.0)) return 0;
  return std::min(4, static_cast<int>(score / 2.0));
}

Histogram histogram(std::span<const ScoredOutput> scores, HistogramMode mode) {
  Histogram h;
  h.mode = mode;
  if (scores.empty()) return h;

  if (mode == HistogramMode::PerOutput) {
    std::array<std::size_t, 5> counts{};
    for (const auto &s : scores) ++counts[static_cast<std::size_t>(score_bin(s.score))];
    for (std::size_t b = 0; b < 5; ++b)
      h.values[b] = static_cast<double>(counts[b]) / static_cast<double>(scores.size());
    return h;
  }

  std::map<std::string, std::set<int>> bins_by_question;
  for (const auto &s : scores) bins_by_question[s.question_id].insert(score_bin(s.score));
  std::array<std::size_t, 5> counts{};
  for (const auto &[_, bins] : bins_by_question)
    for (int b : bins) ++counts[static_cast<std::size_t>(b)];
  for (std::size_t b = 0; b < 5; ++b)
    h.values[b] = static_cast<double>(counts[b]) / static_cast<double>(bins_by_question.size());
  return h;
}

}  // namespace reasonmine::eval
