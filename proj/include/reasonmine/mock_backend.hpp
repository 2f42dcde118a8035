#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reasonmine/backend.hpp"

namespace reasonmine {

/// Deterministic offline backend.
///
/// Scripted responses are keyed by (prompt hash, n, params hash); a script may
/// leave n and/or params unspecified to match any request for that prompt.
/// Lookup tries the most specific key first. Scripted completion lists shorter
/// than n are cycled. Unscripted requests fall through to a generator seeded
/// from (identity, prompt, params, n), so the same request always yields the
/// same answer.
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::string name = "mock", std::uint64_t seed = 0);

  std::string identity() const override;
  std::vector<Completion> complete(const std::string &prompt, const CompletionParams &params,
                                   int n) override;
  TopK first_token_topk(const std::string &prompt, int k) override;
  std::string chat(const std::string &prompt, const ChatParams &params) override;

  void script_completions(const std::string &prompt, std::vector<Completion> outputs,
                          std::optional<int> n = std::nullopt,
                          std::optional<CompletionParams> params = std::nullopt);
  void script_texts(const std::string &prompt, const std::vector<std::string> &texts,
                    double logprob_per_token = -1.0);
  void script_topk(const std::string &prompt, std::vector<TokenLogprob> entries);
  /// Replies are served in order; the last one repeats.
  void script_chat(const std::string &prompt, std::vector<std::string> replies);

  /// The next `times` requests for this prompt throw TransportError. -1 = always.
  void fail_prompt(const std::string &prompt, int times = -1);
  /// Every probe/completion whose prompt starts with prefix throws TransportError.
  void fail_prefix(const std::string &prefix);

  std::size_t calls() const;
  std::size_t complete_calls() const;
  std::size_t topk_calls() const;
  std::size_t chat_calls() const;

  /// Builds a completion from text split into word pieces, each assigned the
  /// same logprob.
  static Completion make_completion(std::string_view text, double logprob_per_token = -1.0,
                                    FinishReason reason = FinishReason::Stop);

 private:
  void maybe_fail(const std::string &prompt);
  std::vector<Completion> generate(const std::string &prompt, const CompletionParams &params,
                                   int n) const;
  TopK generate_topk(const std::string &prompt, int k) const;
  std::string generate_chat(const std::string &prompt, const ChatParams &params) const;

  std::string name_;
  std::uint64_t seed_;

  mutable std::mutex mu_;
  std::map<std::string, std::vector<Completion>> completions_;
  std::map<std::string, std::vector<TokenLogprob>> topk_;
  std::map<std::string, std::vector<std::string>> chat_;
  std::map<std::string, std::size_t> chat_served_;
  std::map<std::string, int> failures_;
  std::vector<std::string> fail_prefixes_;
  std::size_t complete_calls_ = 0;
  std::size_t topk_calls_ = 0;
  std::size_t chat_calls_ = 0;
};

}  // namespace reasonmine
