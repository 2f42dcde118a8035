#pragma once

#include <span>
#include <string>
#include <vector>

#include "reasonmine/types.hpp"

namespace reasonmine::metrics {

/// n-gram repetition rate: 1 - distinct/total over token n-grams.
/// Zero when the list holds fewer than n tokens. Requires n >= 1.
double rep_n(std::span<const std::string> tokens, int n);

/// rep_n with n = 1.
double unigram_rep(std::span<const std::string> tokens);

/// exp(-mean(logprobs)). Throws std::invalid_argument on an empty list or a
/// positive log-probability.
double perplexity(std::span<const double> token_logprobs);

/// Number of backend tokens in the candidate, branch token included.
inline int token_count(const Candidate &c) { return static_cast<int>(c.tokens.size()); }

}  // namespace reasonmine::metrics
