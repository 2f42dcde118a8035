#include "reasonmine/text_metrics.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

namespace reasonmine::metrics {

namespace {

// An n-gram is a window into the caller's token list; hashing and equality
// look at the referenced strings, so no n-gram is ever copied.
struct NgramView {
  const std::string *first;
  std::size_t n;
};

struct NgramHash {
  std::size_t operator()(const NgramView &g) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < g.n; ++i) {
      h ^= std::hash<std::string_view>{}(g.first[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct NgramEq {
  bool operator()(const NgramView &a, const NgramView &b) const noexcept {
    for (std::size_t i = 0; i < a.n; ++i)
      if (a.first[i] != b.first[i]) return false;
    return true;
  }
};

}  // namespace

double rep_n(std::span<const std::string> tokens, int n) {
  if (n < 1) throw std::invalid_argument("rep_n: n must be >= 1");
  const auto un = static_cast<std::size_t>(n);
  if (tokens.size() < un) return 0.0;

  const std::size_t total = tokens.size() - un + 1;
  std::unordered_set<NgramView, NgramHash, NgramEq> seen;
  seen.reserve(total);
  for (std::size_t i = 0; i < total; ++i) seen.insert(NgramView{&tokens[i], un});

  return 1.0 - static_cast<double>(seen.size()) / static_cast<double>(total);
}

double unigram_rep(std::span<const std::string> tokens) { return rep_n(tokens, 1); }

double perplexity(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) throw std::invalid_argument("no tokens");
  // Neumaier summation keeps long uniform sequences length-invariant.
  double sum = 0.0;
  double carry = 0.0;
  for (double lp : token_logprobs) {
    if (!(lp <= 0.0)) throw std::invalid_argument("log-probability must be <= 0");
    const double t = sum + lp;
    if (std::abs(sum) >= std::abs(lp))
      carry += (sum - t) + lp;
    else
      carry += (lp - t) + sum;
    sum = t;
  }
  const double mean = (sum + carry) / static_cast<double>(token_logprobs.size());
  return std::exp(-mean);
}

}  // namespace reasonmine::metrics
