#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>

#include "reasonmine/backend.hpp"

namespace reasonmine {

/// Content-addressed response store. Entries live at
/// <dir>/<sha[0:2]>/<sha>.json where sha is the SHA-256 of the canonical
/// request JSON (keys sorted, compact). All writes go through one mutex.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string key_of(const nlohmann::json &request);

  std::optional<nlohmann::json> get(const nlohmann::json &request) const;
  void put(const nlohmann::json &request, const nlohmann::json &response);

  const std::filesystem::path &dir() const { return dir_; }

 private:
  std::filesystem::path path_of(const std::string &key) const;

  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

/// Serves repeated requests from a ResponseCache and forwards misses to the
/// wrapped backend. Failed requests are never cached.
class CachingBackend : public Backend {
 public:
  CachingBackend(Backend &inner, ResponseCache &cache) : inner_(inner), cache_(cache) {}

  std::string identity() const override { return inner_.identity(); }
  std::vector<Completion> complete(const std::string &prompt, const CompletionParams &params,
                                   int n) override;
  TopK first_token_topk(const std::string &prompt, int k) override;
  std::string chat(const std::string &prompt, const ChatParams &params) override;

  std::size_t hits() const { return hits_.load(); }
  /// Requests forwarded to the wrapped backend.
  std::size_t misses() const { return misses_.load(); }

 private:
  template <class Fetch>
  nlohmann::json lookup_or_fetch(const nlohmann::json &request, Fetch &&fetch);

  Backend &inner_;
  ResponseCache &cache_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace reasonmine
