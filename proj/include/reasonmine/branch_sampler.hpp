#pragma once

// Latent-path mining: probe the first decoding step for the top-k alternative
// tokens, append each to the prompt, and sample continuations from each.

#include <string>
#include <string_view>
#include <vector>

#include "reasonmine/backend.hpp"
#include "reasonmine/types.hpp"

namespace reasonmine::sampler {

/// "Question: " + q + " Answer:". Throws std::invalid_argument on empty q.
std::string render_mining_prompt(std::string_view question);

struct MineOptions {
  // First tokens that end generation. They are skipped during branch selection.
  std::vector<std::string> eos_tokens{"<|endoftext|>", "</s>", "<eos>", "<|eot_id|>", "<|end|>", ""};
  // Extra alternatives requested from the probe so skipped EOS entries can be replaced.
  int probe_margin = 1;
  std::size_t workers = 1;  // branches sampled concurrently
};

struct MineResult {
  std::vector<Candidate> candidates;  // ordered by (branch_index, sample_index)
  std::vector<std::string> warnings;
  bool short_topk = false;
};

/// Expands one question into branch_k x samples_per_branch candidates.
/// A failed probe yields no candidates; a failed branch drops only that
/// branch. Both are reported in warnings.
MineResult mine(const QAInstance &instance, const SamplingConfig &cfg, Backend &backend,
                const MineOptions &options = {});

}  // namespace reasonmine::sampler
