#include "reasonmine/caching_backend.hpp"

#include <fstream>

#include "reasonmine/hashing.hpp"
#include "reasonmine/serialize.hpp"

namespace reasonmine {

using nlohmann::json;

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key_of(const json &request) { return sha256_hex(request.dump()); }

std::filesystem::path ResponseCache::path_of(const std::string &key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<json> ResponseCache::get(const json &request) const {
  const auto path = path_of(key_of(request));
  std::lock_guard lock(mu_);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto entry = json::parse(read_file(path));
    // Guard against hash collisions and hand-edited entries.
    if (entry.at("request") != request) return std::nullopt;
    return entry.at("response");
  } catch (const json::exception &) {
    return std::nullopt;
  }
}

void ResponseCache::put(const json &request, const json &response) {
  const auto path = path_of(key_of(request));
  const json entry{{"request", request}, {"response", response}};
  std::lock_guard lock(mu_);
  write_file(path, entry.dump(1) + "\n");
}

template <class Fetch>
json CachingBackend::lookup_or_fetch(const json &request, Fetch &&fetch) {
  if (auto hit = cache_.get(request)) {
    ++hits_;
    return *hit;
  }
  ++misses_;
  json response = fetch();
  cache_.put(request, response);
  return response;
}

std::vector<Completion> CachingBackend::complete(const std::string &prompt,
                                                 const CompletionParams &params, int n) {
  const json request{{"op", "complete"},
                     {"backend", inner_.identity()},
                     {"prompt", prompt},
                     {"params", params},
                     {"n", n}};
  return lookup_or_fetch(request, [&] { return json(inner_.complete(prompt, params, n)); })
      .get<std::vector<Completion>>();
}

TopK CachingBackend::first_token_topk(const std::string &prompt, int k) {
  const json request{{"op", "first_token_topk"},
                     {"backend", inner_.identity()},
                     {"prompt", prompt},
                     {"k", k}};
  const auto response = lookup_or_fetch(request, [&] {
    const auto top = inner_.first_token_topk(prompt, k);
    return json{{"entries", top.entries}, {"short_topk", top.short_topk}};
  });
  TopK out;
  response.at("entries").get_to(out.entries);
  response.at("short_topk").get_to(out.short_topk);
  return out;
}

std::string CachingBackend::chat(const std::string &prompt, const ChatParams &params) {
  const json request{{"op", "chat"},
                     {"backend", inner_.identity()},
                     {"prompt", prompt},
                     {"temperature", params.temperature},
                     {"attempt", params.attempt}};
  return lookup_or_fetch(request, [&] { return json(inner_.chat(prompt, params)); })
      .get<std::string>();
}

}  // namespace reasonmine
