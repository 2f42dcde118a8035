#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "reasonmine/backend.hpp"

namespace reasonmine {

struct EndpointConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8000/v1"
  std::string model;
  std::string api_key;   // sent as a bearer token when non-empty
  int logprob_limit = 20;
  int max_inflight = 8;
  std::chrono::seconds timeout{120};
  RetryPolicy retry;
};

/// Client for OpenAI-compatible `/completions` and `/chat/completions`.
/// Accepts both the legacy logprobs layout ({tokens, token_logprobs,
/// top_logprobs}) and the newer per-token `content` list.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(EndpointConfig cfg);
  ~HttpBackend() override;

  std::string identity() const override;
  std::vector<Completion> complete(const std::string &prompt, const CompletionParams &params,
                                   int n) override;
  TopK first_token_topk(const std::string &prompt, int k) override;
  std::string chat(const std::string &prompt, const ChatParams &params) override;

  /// HTTP requests issued so far, retries included.
  std::size_t requests() const { return requests_.load(); }

 private:
  nlohmann::json post(const std::string &path, const nlohmann::json &body);

  EndpointConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;  // path under the origin, no trailing slash
  std::unique_ptr<std::counting_semaphore<>> inflight_;
  std::atomic<std::size_t> requests_{0};
};

// Response decoding, exposed for tests.
std::vector<Completion> parse_completion_response(const nlohmann::json &body, int n,
                                                  const std::string &raw);
std::vector<TokenLogprob> parse_first_token_alternatives(const nlohmann::json &body,
                                                         const std::string &raw);
std::string parse_chat_response(const nlohmann::json &body, const std::string &raw);

}  // namespace reasonmine
