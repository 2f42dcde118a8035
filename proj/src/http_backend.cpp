#include "reasonmine/http_backend.hpp"

#include <httplib.h>

#include <algorithm>

#include "reasonmine/log.hpp"

namespace reasonmine {

using nlohmann::json;

namespace {

struct SemaphoreGuard {
  explicit SemaphoreGuard(std::counting_semaphore<> &s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  std::counting_semaphore<> &sem;
};

[[noreturn]] void malformed(const std::string &what, const std::string &raw) {
  log::warn("malformed backend response (" + what + "): " + raw.substr(0, 2000));
  throw MalformedResponse("malformed response: " + what, raw);
}

FinishReason finish_reason_of(const json &choice) {
  auto it = choice.find("finish_reason");
  if (it != choice.end() && it->is_string() && it->get<std::string>() == "length")
    return FinishReason::Length;
  return FinishReason::Stop;
}

void read_logprobs(const json &lp, Completion &c, const std::string &raw) {
  if (lp.contains("content") && lp["content"].is_array()) {
    for (const auto &entry : lp["content"]) {
      if (!entry.contains("token") || !entry.contains("logprob")) malformed("logprob entry", raw);
      c.tokens.push_back(entry["token"].get<std::string>());
      c.token_logprobs.push_back(std::min(0.0, entry["logprob"].get<double>()));
    }
    return;
  }
  if (!lp.contains("tokens") || !lp.contains("token_logprobs")) malformed("logprobs fields", raw);
  for (const auto &t : lp["tokens"]) c.tokens.push_back(t.get<std::string>());
  for (const auto &v : lp["token_logprobs"]) {
    if (!v.is_number()) malformed("null token logprob", raw);
    c.token_logprobs.push_back(std::min(0.0, v.get<double>()));
  }
}

}  // namespace

std::vector<Completion> parse_completion_response(const json &body, int n, const std::string &raw) {
  if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array())
    malformed("missing choices", raw);
  std::vector<std::pair<int, Completion>> indexed;
  try {
    int pos = 0;
    for (const auto &choice : body["choices"]) {
      Completion c;
      c.text = choice.at("text").get<std::string>();
      const auto &lp = choice.at("logprobs");
      if (!lp.is_object()) malformed("missing logprobs", raw);
      read_logprobs(lp, c, raw);
      if (c.tokens.size() != c.token_logprobs.size()) malformed("tokens/logprobs length", raw);
      c.finish_reason = finish_reason_of(choice);
      const int index = choice.value("index", pos);
      indexed.emplace_back(index, std::move(c));
      ++pos;
    }
  } catch (const json::exception &e) {
    malformed(e.what(), raw);
  }
  if (static_cast<int>(indexed.size()) != n)
    malformed("expected " + std::to_string(n) + " choices, got " + std::to_string(indexed.size()),
              raw);
  std::stable_sort(indexed.begin(), indexed.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<Completion> out;
  for (auto &[_, c] : indexed) out.push_back(std::move(c));
  return out;
}

std::vector<TokenLogprob> parse_first_token_alternatives(const json &body, const std::string &raw) {
  std::vector<TokenLogprob> out;
  try {
    const auto &lp = body.at("choices").at(0).at("logprobs");
    if (lp.contains("content")) {
      for (const auto &alt : lp.at("content").at(0).at("top_logprobs"))
        out.push_back({alt.at("token").get<std::string>(), alt.at("logprob").get<double>()});
    } else {
      for (const auto &[tok, v] : lp.at("top_logprobs").at(0).items())
        out.push_back({tok, v.get<double>()});
    }
  } catch (const json::exception &e) {
    malformed(e.what(), raw);
  }
  for (auto &e : out) e.logprob = std::min(0.0, e.logprob);
  sort_topk(out);
  return out;
}

std::string parse_chat_response(const json &body, const std::string &raw) {
  std::string content;
  try {
    const auto &msg = body.at("choices").at(0).at("message");
    if (msg.contains("content") && msg["content"].is_string()) content = msg["content"].get<std::string>();
  } catch (const json::exception &e) {
    malformed(e.what(), raw);
  }
  if (content.empty()) throw BackendError("empty judge response");
  return content;
}

HttpBackend::HttpBackend(EndpointConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme_end = cfg_.base_url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("endpoint URL needs a scheme: " + cfg_.base_url);
  const auto path_start = cfg_.base_url.find('/', scheme_end + 3);
  origin_ = cfg_.base_url.substr(0, path_start);
  prefix_ = path_start == std::string::npos ? "" : cfg_.base_url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  inflight_ = std::make_unique<std::counting_semaphore<>>(std::max(1, cfg_.max_inflight));
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::identity() const { return cfg_.base_url + "|" + cfg_.model; }

json HttpBackend::post(const std::string &path, const json &body) {
  return with_retry(cfg_.retry, [&]() -> json {
    SemaphoreGuard slot(*inflight_);
    ++requests_;
    httplib::Client client(origin_);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    auto res = client.Post(prefix_ + path, headers, body.dump(), "application/json");
    if (!res) throw TransportError("transport error: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
      throw TransportError("HTTP " + std::to_string(res->status));
    if (res->status != 200)
      throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    try {
      return json::parse(res->body);
    } catch (const json::parse_error &e) {
      malformed(e.what(), res->body);
    }
  });
}

std::vector<Completion> HttpBackend::complete(const std::string &prompt,
                                              const CompletionParams &params, int n) {
  if (n < 1) throw std::invalid_argument("complete: n must be >= 1");
  json body{{"model", cfg_.model},   {"prompt", prompt},           {"max_tokens", params.max_tokens},
            {"temperature", params.temperature}, {"top_p", params.top_p}, {"n", n},
            {"logprobs", 1}};
  if (params.top_k > 0) body["top_k"] = params.top_k;
  if (params.seed) body["seed"] = *params.seed;
  const auto response = post("/completions", body);
  return parse_completion_response(response, n, response.dump());
}

TopK HttpBackend::first_token_topk(const std::string &prompt, int k) {
  if (k < 1 || k > cfg_.logprob_limit)
    throw std::invalid_argument("first_token_topk: k outside [1, logprob limit]");
  json body{{"model", cfg_.model}, {"prompt", prompt}, {"max_tokens", 1},
            {"temperature", 0.0},  {"n", 1},           {"logprobs", k}};
  const auto response = post("/completions", body);
  TopK out;
  out.entries = parse_first_token_alternatives(response, response.dump());
  out.short_topk = out.entries.size() < static_cast<std::size_t>(k);
  if (out.entries.size() > static_cast<std::size_t>(k)) out.entries.resize(static_cast<std::size_t>(k));
  return out;
}

std::string HttpBackend::chat(const std::string &prompt, const ChatParams &params) {
  json body{{"model", cfg_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", params.temperature}};
  const auto response = post("/chat/completions", body);
  return parse_chat_response(response, response.dump());
}

}  // namespace reasonmine
