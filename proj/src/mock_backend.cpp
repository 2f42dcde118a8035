#include "reasonmine/mock_backend.hpp"

#include <array>
#include <random>
#include <string_view>

#include "reasonmine/hashing.hpp"
#include "reasonmine/tokenize.hpp"

namespace reasonmine {

namespace {

constexpr std::array<std::string_view, 96> kVocab{
    "the",     "a",        "water",    "people",  "because", "animals", "can",      "will",
    "often",   "never",    "usually",  "when",    "they",    "it",      "is",       "are",
    "was",     "were",     "have",     "has",     "need",    "make",    "find",     "store",
    "house",   "city",     "forest",   "river",   "food",    "time",    "day",      "night",
    "sleep",   "eat",      "run",      "think",   "know",    "see",     "feel",     "cold",
    "warm",    "large",    "small",    "quickly", "slowly",  "would",   "should",   "could",
    "there",   "where",    "which",    "that",    "this",    "these",   "those",    "many",
    "few",     "some",     "most",     "every",   "school",  "office",  "kitchen",  "garden",
    "money",   "book",     "music",    "friend",  "family",  "work",    "play",     "rest",
    "light",   "dark",     "energy",   "reason",  "answer",  "choice",  "question", "idea",
    "place",   "result",   "problem",  "fact",    "likely",  "true",    "false",    "first",
    "second",  "therefore", "however", "also",    "then",    "so",      "since",    "while"};

constexpr std::array<std::string_view, 12> kFirstTokens{
    " The", " Yes", " No", " I", " It", " A", " This", " Because", " In", " We", " They", " If"};

constexpr std::array<std::string_view, 6> kReasoningSentences{
    "Most people know this from everyday experience.",
    "The key fact is how the object is normally used.",
    "This depends on where such things are usually found.",
    "We should compare each option with the question.",
    "The question asks about a common situation.",
    "Only one option matches every part of the question."};

bool looks_multiple_choice(std::string_view prompt) {
  return prompt.find("Answer Choices:") != std::string_view::npos;
}

bool looks_teacher(std::string_view prompt) {
  return prompt.ends_with("Let's think step by step.") ||
         prompt.ends_with("Let’s think step by step.");
}

bool looks_judge(std::string_view prompt) {
  return prompt.find("Score for Coherence") != std::string_view::npos;
}

std::string pick_answer(std::mt19937_64 &rng, std::string_view prompt) {
  if (looks_multiple_choice(prompt)) return std::string(1, static_cast<char>('A' + rng() % 5));
  return rng() % 2 ? "yes" : "no";
}

double draw_unit(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

std::string key_of(const std::string &prompt, std::optional<int> n,
                   std::optional<CompletionParams> params) {
  std::string key = std::to_string(fnv1a64(prompt)) + "|";
  key += n ? std::to_string(*n) : "*";
  key += "|";
  key += params ? std::to_string(fnv1a64(nlohmann::json(*params).dump())) : "*";
  return key;
}

}  // namespace

MockBackend::MockBackend(std::string name, std::uint64_t seed)
    : name_(std::move(name)), seed_(seed) {}

std::string MockBackend::identity() const { return "mock:" + name_ + ":" + std::to_string(seed_); }

Completion MockBackend::make_completion(std::string_view text, double logprob_per_token,
                                        FinishReason reason) {
  Completion c;
  c.text = std::string(text);
  c.tokens = word_pieces(text);
  c.token_logprobs.assign(c.tokens.size(), logprob_per_token);
  c.finish_reason = reason;
  return c;
}

void MockBackend::script_completions(const std::string &prompt, std::vector<Completion> outputs,
                                     std::optional<int> n,
                                     std::optional<CompletionParams> params) {
  std::lock_guard lock(mu_);
  completions_[key_of(prompt, n, params)] = std::move(outputs);
}

void MockBackend::script_texts(const std::string &prompt, const std::vector<std::string> &texts,
                               double logprob_per_token) {
  std::vector<Completion> outputs;
  for (const auto &t : texts) outputs.push_back(make_completion(t, logprob_per_token));
  script_completions(prompt, std::move(outputs));
}

void MockBackend::script_topk(const std::string &prompt, std::vector<TokenLogprob> entries) {
  std::lock_guard lock(mu_);
  topk_[prompt] = std::move(entries);
}

void MockBackend::script_chat(const std::string &prompt, std::vector<std::string> replies) {
  std::lock_guard lock(mu_);
  chat_[prompt] = std::move(replies);
  chat_served_[prompt] = 0;
}

void MockBackend::fail_prompt(const std::string &prompt, int times) {
  std::lock_guard lock(mu_);
  failures_[prompt] = times;
}

void MockBackend::fail_prefix(const std::string &prefix) {
  std::lock_guard lock(mu_);
  fail_prefixes_.push_back(prefix);
}

std::size_t MockBackend::calls() const {
  std::lock_guard lock(mu_);
  return complete_calls_ + topk_calls_ + chat_calls_;
}

std::size_t MockBackend::complete_calls() const {
  std::lock_guard lock(mu_);
  return complete_calls_;
}

std::size_t MockBackend::topk_calls() const {
  std::lock_guard lock(mu_);
  return topk_calls_;
}

std::size_t MockBackend::chat_calls() const {
  std::lock_guard lock(mu_);
  return chat_calls_;
}

// Caller holds mu_.
void MockBackend::maybe_fail(const std::string &prompt) {
  for (const auto &prefix : fail_prefixes_)
    if (prompt.starts_with(prefix)) throw TransportError("mock transport failure");
  auto it = failures_.find(prompt);
  if (it == failures_.end() || it->second == 0) return;
  if (it->second > 0) --it->second;
  throw TransportError("mock transport failure");
}

std::vector<Completion> MockBackend::complete(const std::string &prompt,
                                              const CompletionParams &params, int n) {
  if (n < 1) throw std::invalid_argument("complete: n must be >= 1");
  std::vector<Completion> scripted;
  {
    std::lock_guard lock(mu_);
    ++complete_calls_;
    maybe_fail(prompt);
    for (const auto &key : {key_of(prompt, n, params), key_of(prompt, n, std::nullopt),
                            key_of(prompt, std::nullopt, std::nullopt)}) {
      if (auto it = completions_.find(key); it != completions_.end() && !it->second.empty()) {
        scripted = it->second;
        break;
      }
    }
  }
  if (scripted.empty()) return generate(prompt, params, n);

  std::vector<Completion> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(scripted[static_cast<std::size_t>(i) % scripted.size()]);
  return out;
}

TopK MockBackend::first_token_topk(const std::string &prompt, int k) {
  if (k < 1) throw std::invalid_argument("first_token_topk: k must be >= 1");
  std::vector<TokenLogprob> scripted;
  bool have_script = false;
  {
    std::lock_guard lock(mu_);
    ++topk_calls_;
    maybe_fail(prompt);
    if (auto it = topk_.find(prompt); it != topk_.end()) {
      scripted = it->second;
      have_script = true;
    }
  }
  if (!have_script) return generate_topk(prompt, k);

  sort_topk(scripted);
  TopK out;
  out.short_topk = scripted.size() < static_cast<std::size_t>(k);
  scripted.resize(std::min(scripted.size(), static_cast<std::size_t>(k)));
  out.entries = std::move(scripted);
  return out;
}

std::string MockBackend::chat(const std::string &prompt, const ChatParams &params) {
  std::string reply;
  bool have_script = false;
  {
    std::lock_guard lock(mu_);
    ++chat_calls_;
    maybe_fail(prompt);
    if (auto it = chat_.find(prompt); it != chat_.end() && !it->second.empty()) {
      auto &served = chat_served_[prompt];
      reply = it->second[std::min(served, it->second.size() - 1)];
      ++served;
      have_script = true;
    }
  }
  if (!have_script) reply = generate_chat(prompt, params);
  if (reply.empty()) throw BackendError("empty judge response");
  return reply;
}

std::vector<Completion> MockBackend::generate(const std::string &prompt,
                                              const CompletionParams &params, int n) const {
  const auto base = fnv1a64(nlohmann::json(params).dump() + "|" + std::to_string(n),
                            fnv1a64(prompt, fnv1a64(identity())));
  std::vector<Completion> out;
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(base + static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL);
    std::string text;
    if (looks_teacher(prompt)) {
      const int sentences = 2 + static_cast<int>(rng() % 3);
      for (int s = 0; s < sentences; ++s) {
        text += " ";
        text += kReasoningSentences[rng() % kReasoningSentences.size()];
      }
      text += " So the answer is " + pick_answer(rng, prompt) + ".";
    } else {
      const int words = 8 + static_cast<int>(rng() % 53);
      for (int w = 0; w < words; ++w) {
        text += " ";
        text += kVocab[rng() % kVocab.size()];
      }
      const auto roll = rng() % 10;
      if (roll < 4) {
        text += ". So the answer is " + pick_answer(rng, prompt);
      } else if (roll == 4) {
        text += ". Question: what is it? Answer: it";
      }
    }

    Completion c;
    auto pieces = word_pieces(text);
    const auto budget = static_cast<std::size_t>(std::max(params.max_tokens, 1));
    c.finish_reason = FinishReason::Stop;
    if (pieces.size() > budget) {
      pieces.resize(budget);
      c.finish_reason = FinishReason::Length;
    }
    for (const auto &p : pieces) {
      c.text += p;
      c.token_logprobs.push_back(-(0.3 + 3.0 * draw_unit(rng)));
    }
    c.tokens = std::move(pieces);
    out.push_back(std::move(c));
  }
  return out;
}

TopK MockBackend::generate_topk(const std::string &prompt, int k) const {
  std::mt19937_64 rng(fnv1a64(prompt, fnv1a64(identity() + "|topk")));
  std::vector<std::string_view> pool(kFirstTokens.begin(), kFirstTokens.end());
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);

  TopK out;
  const auto take = std::min(pool.size(), static_cast<std::size_t>(k));
  out.short_topk = take < static_cast<std::size_t>(k);
  double lp = -0.4 - draw_unit(rng);
  for (std::size_t i = 0; i < take; ++i) {
    out.entries.push_back({std::string(pool[i]), lp});
    lp -= 0.1 + draw_unit(rng);
  }
  return out;
}

std::string MockBackend::generate_chat(const std::string &prompt, const ChatParams &params) const {
  if (!looks_judge(prompt)) return "OK";
  std::mt19937_64 rng(
      fnv1a64(prompt, fnv1a64(identity() + "|chat|" + std::to_string(params.attempt))));
  const auto s = [&] { return std::to_string(rng() % 11); };
  std::string reply = "1. Coherence: The reasoning is mostly easy to follow.\n";
  reply += "   - Score for Coherence: " + s() + "\n";
  reply += "2. Relevance: The steps relate to the question.\n";
  reply += "   - Score for Relevance: " + s() + "\n";
  reply += "3. Logical Consistency: No major contradictions.\n";
  reply += "   - Score for Logical Consistency: " + s() + "\n";
  reply += "4. Completeness: Some parts are addressed.\n";
  reply += "   - Score for Completeness: " + s() + "\n";
  reply += "Overall, the reasoning is moderately effective.";
  return reply;
}

}  // namespace reasonmine
