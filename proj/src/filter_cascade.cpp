#include "reasonmine/filter_cascade.hpp"

#include <tuple>

#include "reasonmine/text_metrics.hpp"

namespace reasonmine::filter {

bool imitates_qa_format(std::string_view text) {
  const auto q = text.find("Question:");
  if (q == std::string_view::npos) return false;
  return text.find("Answer:", q + 9) != std::string_view::npos;
}

FilterOutcome stage_verdicts(const Candidate &c, const Thresholds &th) {
  FilterOutcome o;
  o.question_id = c.question_id;
  o.branch_index = c.branch_index;
  o.sample_index = c.sample_index;
  o.token_count = metrics::token_count(c);

  o.pattern_pass = !imitates_qa_format(c.text);
  o.length_pass = o.token_count >= th.min_tokens;
  o.rep2 = metrics::rep_n(c.tokens, 2);
  o.rep2_pass = o.rep2 <= th.max_rep2 + kBoundaryTolerance;
  if (c.token_logprobs.empty()) {
    o.perplexity = 1.0;
    o.ppl_pass = false;
  } else {
    o.perplexity = metrics::perplexity(c.token_logprobs);
    o.ppl_pass = o.perplexity >= th.min_ppl - kBoundaryTolerance;
  }
  o.selected = false;
  return o;
}

std::optional<FilterOutcome> select_best(std::span<const FilterOutcome> outcomes) {
  const FilterOutcome *best = nullptr;
  for (const auto &o : outcomes) {
    if (!o.passes_all()) continue;
    if (!best || std::tie(o.rep2, o.branch_index, o.sample_index) <
                     std::tie(best->rep2, best->branch_index, best->sample_index))
      best = &o;
  }
  if (!best) return std::nullopt;
  FilterOutcome chosen = *best;
  chosen.selected = true;
  return chosen;
}

CascadeResult run_cascade(std::span<const Candidate> candidates, const Thresholds &th) {
  CascadeResult result;
  result.outcomes.reserve(candidates.size());
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    result.outcomes.push_back(stage_verdicts(candidates[i], th));
    by_question[candidates[i].question_id].push_back(i);
  }

  for (const auto &[qid, indices] : by_question) {
    std::vector<FilterOutcome> group;
    group.reserve(indices.size());
    for (auto i : indices) group.push_back(result.outcomes[i]);
    const auto best = select_best(group);
    if (!best) continue;
    for (auto i : indices) {
      auto &o = result.outcomes[i];
      if (o.branch_index == best->branch_index && o.sample_index == best->sample_index) {
        o.selected = true;
        result.selected.emplace(qid, candidates[i]);
        break;
      }
    }
  }
  return result;
}

}  // namespace reasonmine::filter
