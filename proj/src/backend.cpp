#include "reasonmine/backend.hpp"

#include <thread>

namespace reasonmine {

CompletionParams CompletionParams::from(const SamplingConfig &cfg) {
  CompletionParams p;
  p.max_tokens = cfg.max_new_tokens;
  p.temperature = cfg.temperature;
  p.top_p = cfg.top_p;
  p.top_k = cfg.top_k;
  p.seed = cfg.seed;
  return p;
}

RetryPolicy RetryPolicy::immediate(int attempts) {
  RetryPolicy p;
  p.max_attempts = attempts;
  p.backoff.clear();
  p.sleep = [](std::chrono::milliseconds) {};
  return p;
}

void sleep_for(std::chrono::milliseconds d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

void to_json(nlohmann::json &j, const Completion &c) {
  j = nlohmann::json{{"text", c.text},
                     {"tokens", c.tokens},
                     {"token_logprobs", c.token_logprobs},
                     {"finish_reason", to_string(c.finish_reason)}};
}

void from_json(const nlohmann::json &j, Completion &c) {
  j.at("text").get_to(c.text);
  j.at("tokens").get_to(c.tokens);
  j.at("token_logprobs").get_to(c.token_logprobs);
  const auto fr = j.at("finish_reason").get<std::string>();
  c.finish_reason = parse_finish_reason(fr).value_or(FinishReason::Stop);
}

void to_json(nlohmann::json &j, const TokenLogprob &t) {
  j = nlohmann::json{{"token", t.token}, {"logprob", t.logprob}};
}

void from_json(const nlohmann::json &j, TokenLogprob &t) {
  j.at("token").get_to(t.token);
  j.at("logprob").get_to(t.logprob);
}

void to_json(nlohmann::json &j, const CompletionParams &p) {
  j = nlohmann::json{{"max_tokens", p.max_tokens},
                     {"temperature", p.temperature},
                     {"top_p", p.top_p},
                     {"top_k", p.top_k},
                     {"seed", p.seed ? nlohmann::json(*p.seed) : nlohmann::json(nullptr)}};
}

void sort_topk(std::vector<TokenLogprob> &entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) {
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    return a.token < b.token;
  });
}

}  // namespace reasonmine
