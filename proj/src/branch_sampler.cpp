#include "reasonmine/branch_sampler.hpp"

#include <algorithm>
#include <optional>

#include "reasonmine/parallel.hpp"

namespace reasonmine::sampler {

std::string render_mining_prompt(std::string_view question) {
  if (question.empty()) throw std::invalid_argument("empty question");
  std::string out = "Question: ";
  out += question;
  out += " Answer:";
  return out;
}

MineResult mine(const QAInstance &instance, const SamplingConfig &cfg, Backend &backend,
                const MineOptions &options) {
  if (auto errs = validate(cfg); !errs.empty())
    throw std::invalid_argument("invalid sampling config: " + errs.front());

  MineResult result;
  const std::string prompt = render_mining_prompt(prompt_question(instance));

  TopK probe;
  try {
    probe = backend.first_token_topk(prompt, cfg.branch_k + std::max(0, options.probe_margin));
  } catch (const BackendError &e) {
    result.warnings.push_back(instance.id + ": first-token probe failed: " + e.what());
    return result;
  }

  std::vector<TokenLogprob> branches;
  for (const auto &entry : probe.entries) {
    if (std::find(options.eos_tokens.begin(), options.eos_tokens.end(), entry.token) !=
        options.eos_tokens.end())
      continue;
    if (std::any_of(branches.begin(), branches.end(),
                    [&](const auto &b) { return b.token == entry.token; }))
      continue;
    branches.push_back(entry);
    if (static_cast<int>(branches.size()) == cfg.branch_k) break;
  }
  if (static_cast<int>(branches.size()) < cfg.branch_k) {
    result.short_topk = true;
    result.warnings.push_back(instance.id + ": short top-k, " + std::to_string(branches.size()) +
                              " of " + std::to_string(cfg.branch_k) + " branches available");
  }

  CompletionParams base = CompletionParams::from(cfg);
  // The branch token is the first generated token and counts against the budget.
  base.max_tokens = std::max(1, cfg.max_new_tokens - 1);

  using BranchOutput = std::optional<std::vector<Completion>>;
  std::vector<std::string> branch_errors(branches.size());
  auto outputs = ordered_parallel_map(
      branches.size(), options.workers, [&](std::size_t b) -> BranchOutput {
        CompletionParams params = base;
        if (cfg.seed) params.seed = *cfg.seed + static_cast<std::int64_t>(b);
        try {
          return backend.complete(prompt + branches[b].token, params, cfg.samples_per_branch);
        } catch (const BackendError &e) {
          branch_errors[b] = e.what();
          return std::nullopt;
        }
      });

  for (std::size_t b = 0; b < branches.size(); ++b) {
    if (!outputs[b]) {
      result.warnings.push_back(instance.id + ": branch " + std::to_string(b) + " (" +
                                branches[b].token + ") dropped: " + branch_errors[b]);
      continue;
    }
    int sample = 0;
    for (auto &completion : *outputs[b]) {
      Candidate c;
      c.question_id = instance.id;
      c.branch_index = static_cast<int>(b);
      c.sample_index = sample++;
      c.branch_token = branches[b].token;
      c.text = branches[b].token + completion.text;
      c.tokens.reserve(completion.tokens.size() + 1);
      c.tokens.push_back(branches[b].token);
      c.tokens.insert(c.tokens.end(), completion.tokens.begin(), completion.tokens.end());
      c.token_logprobs.reserve(completion.token_logprobs.size() + 1);
      c.token_logprobs.push_back(branches[b].logprob);
      c.token_logprobs.insert(c.token_logprobs.end(), completion.token_logprobs.begin(),
                              completion.token_logprobs.end());
      c.finish_reason = completion.finish_reason;
      result.candidates.push_back(std::move(c));
    }
  }
  return result;
}

}  // namespace reasonmine::sampler
