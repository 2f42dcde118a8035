#pragma once

// Uniform client surface over text-completion and chat endpoints.
//
// Three implementations live behind this interface:
//   MockBackend     scripted, deterministic, offline (mock_backend.hpp)
//   HttpBackend     any OpenAI-compatible server (http_backend.hpp)
//   CachingBackend  content-addressed response cache wrapping another backend
//
// Errors are exceptions. TransportError is retryable and item-scoped: callers
// drop the affected item and keep the run going. MalformedResponse carries the
// raw body for logging.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reasonmine/types.hpp"

namespace reasonmine {

struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransportError : BackendError {
  using BackendError::BackendError;
};

struct MalformedResponse : BackendError {
  MalformedResponse(const std::string &what, std::string raw_body)
      : BackendError(what), raw(std::move(raw_body)) {}
  std::string raw;
};

struct Completion {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<double> token_logprobs;
  FinishReason finish_reason = FinishReason::Stop;

  bool operator==(const Completion &) const = default;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;

  bool operator==(const TokenLogprob &) const = default;
};

struct TopK {
  std::vector<TokenLogprob> entries;  // descending by logprob
  bool short_topk = false;            // backend returned fewer than requested
};

/// The subset of sampling parameters a completion request carries.
struct CompletionParams {
  int max_tokens = 256;
  double temperature = 1.0;
  double top_p = 1.0;
  int top_k = 0;  // 0 = not sent
  std::optional<std::int64_t> seed;

  static CompletionParams from(const SamplingConfig &cfg);

  bool operator==(const CompletionParams &) const = default;
};

struct ChatParams {
  double temperature = 0.0;
  // Distinguishes a fresh retry from the original request. Part of the cache
  // key only; never sent over the wire.
  int attempt = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;

  /// Stable identity used in cache keys, e.g. "http://host:8000/v1|gpt2".
  virtual std::string identity() const = 0;

  /// Exactly n completions, each with per-token logprobs.
  virtual std::vector<Completion> complete(const std::string &prompt,
                                           const CompletionParams &params, int n) = 0;

  /// Ranked first-token alternatives from a single-token probe.
  virtual TopK first_token_topk(const std::string &prompt, int k) = 0;

  /// Raw judge reply. Throws BackendError("empty judge response") on an empty reply.
  virtual std::string chat(const std::string &prompt, const ChatParams &params) = 0;
};

void sleep_for(std::chrono::milliseconds d);

struct RetryPolicy {
  int max_attempts = 3;
  std::vector<std::chrono::milliseconds> backoff{std::chrono::seconds(1), std::chrono::seconds(2),
                                                 std::chrono::seconds(4)};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for

  static RetryPolicy immediate(int attempts = 3);
};

/// Runs fn, retrying on TransportError per policy. Other exceptions pass through.
template <class F>
auto with_retry(const RetryPolicy &policy, F &&fn) -> decltype(fn()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError &) {
      if (attempt >= policy.max_attempts) throw;
      std::chrono::milliseconds wait{0};
      if (!policy.backoff.empty())
        wait = policy.backoff[std::min<std::size_t>(attempt - 1, policy.backoff.size() - 1)];
      if (policy.sleep)
        policy.sleep(wait);
      else
        sleep_for(wait);
    }
  }
}

// JSON shapes used by the response cache.
void to_json(nlohmann::json &j, const Completion &c);
void from_json(const nlohmann::json &j, Completion &c);
void to_json(nlohmann::json &j, const TokenLogprob &t);
void from_json(const nlohmann::json &j, TokenLogprob &t);
void to_json(nlohmann::json &j, const CompletionParams &p);

/// Orders alternatives by descending logprob, ties by token text.
void sort_topk(std::vector<TokenLogprob> &entries);

}  // namespace reasonmine
