#include <doctest.h>

#include <set>

#include "reasonmine/branch_sampler.hpp"
#include "reasonmine/mock_backend.hpp"

using namespace reasonmine;

namespace {
QAInstance fish() { return {"s1", "Do fish sleep?", "yes", std::nullopt, Dataset::StrategyQA}; }
}  // namespace

TEST_CASE("mining prompt template") {
  CHECK(sampler::render_mining_prompt("Do fish sleep?") == "Question: Do fish sleep? Answer:");
  CHECK(sampler::render_mining_prompt("Do fish\nsleep?") == "Question: Do fish\nsleep? Answer:");
  CHECK_THROWS_AS(sampler::render_mining_prompt(""), std::invalid_argument);
}

TEST_CASE("mine yields branch_k x samples_per_branch ordered candidates") {
  MockBackend mock("student", 3);
  SamplingConfig cfg;
  const auto r = sampler::mine(fish(), cfg, mock);
  REQUIRE(r.candidates.size() == 25);
  CHECK(r.warnings.empty());
  std::set<std::string> branch_tokens;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto &c = r.candidates[i];
    CHECK(c.branch_index == static_cast<int>(i / 5));
    CHECK(c.sample_index == static_cast<int>(i % 5));
    CHECK(c.text.rfind(c.branch_token, 0) == 0);
    CHECK(c.tokens.front() == c.branch_token);
    CHECK(c.tokens.size() == c.token_logprobs.size());
    CHECK(validate(c).empty());
    CHECK(c.branch_token == r.candidates[c.branch_index * 5].branch_token);
    branch_tokens.insert(c.branch_token);
  }
  CHECK(branch_tokens.size() == 5);

  MockBackend again("student", 3);
  CHECK(sampler::mine(fish(), cfg, again).candidates == r.candidates);
}

TEST_CASE("degenerate 1x1 config") {
  MockBackend mock;
  SamplingConfig cfg;
  cfg.branch_k = 1;
  cfg.samples_per_branch = 1;
  CHECK(sampler::mine(fish(), cfg, mock).candidates.size() == 1);
}

TEST_CASE("scripted branches appear in order") {
  MockBackend mock;
  const std::string prompt = "Question: Do fish sleep? Answer:";
  mock.script_topk(prompt, {{" Yes", -0.5}, {" No", -1.2}, {" Maybe", -3.0}});
  mock.script_texts(prompt + " Yes", {", they rest.", ", at night."});
  mock.script_texts(prompt + " No", {", never.", ", not really."});
  SamplingConfig cfg;
  cfg.branch_k = 2;
  cfg.samples_per_branch = 2;
  const auto r = sampler::mine(fish(), cfg, mock);
  REQUIRE(r.candidates.size() == 4);
  CHECK(r.candidates[0].text == " Yes, they rest.");
  CHECK(r.candidates[1].text == " Yes, at night.");
  CHECK(r.candidates[2].text == " No, never.");
  CHECK(r.candidates[3].text == " No, not really.");
  CHECK(r.candidates[0].token_logprobs.front() == -0.5);
  CHECK(r.candidates[2].token_logprobs.front() == -1.2);
}

TEST_CASE("EOS first tokens are skipped and replaced") {
  MockBackend mock;
  const std::string prompt = "Question: Do fish sleep? Answer:";
  mock.script_topk(prompt, {{"<|endoftext|>", -0.1}, {" Yes", -0.5}, {" No", -1.2}});
  SamplingConfig cfg;
  cfg.branch_k = 2;
  cfg.samples_per_branch = 1;
  const auto r = sampler::mine(fish(), cfg, mock);
  REQUIRE(r.candidates.size() == 2);
  CHECK(r.candidates[0].branch_token == " Yes");
  CHECK(r.candidates[1].branch_token == " No");
  CHECK_FALSE(r.short_topk);
}

TEST_CASE("short top-k proceeds with available branches") {
  MockBackend mock;
  const std::string prompt = "Question: Do fish sleep? Answer:";
  mock.script_topk(prompt, {{" Yes", -0.5}, {" No", -1.2}});
  SamplingConfig cfg;
  cfg.branch_k = 5;
  cfg.samples_per_branch = 3;
  const auto r = sampler::mine(fish(), cfg, mock);
  CHECK(r.short_topk);
  CHECK(r.candidates.size() == 6);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("failures drop a branch or the whole question with a warning") {
  const std::string prompt = "Question: Do fish sleep? Answer:";
  SamplingConfig cfg;
  cfg.branch_k = 2;
  cfg.samples_per_branch = 2;

  MockBackend branch_fail;
  branch_fail.script_topk(prompt, {{" Yes", -0.5}, {" No", -1.2}});
  branch_fail.fail_prompt(prompt + " Yes");
  auto r = sampler::mine(fish(), cfg, branch_fail);
  REQUIRE(r.candidates.size() == 2);
  CHECK(r.candidates[0].branch_token == " No");
  CHECK(r.candidates[0].branch_index == 1);
  CHECK(r.warnings.size() == 1);

  MockBackend probe_fail;
  probe_fail.fail_prompt(prompt);
  r = sampler::mine(fish(), cfg, probe_fail);
  CHECK(r.candidates.empty());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("parallel branch sampling keeps order") {
  MockBackend serial_mock, parallel_mock;
  SamplingConfig cfg;
  cfg.seed = 11;
  sampler::MineOptions par;
  par.workers = 4;
  CHECK(sampler::mine(fish(), cfg, serial_mock).candidates ==
        sampler::mine(fish(), cfg, parallel_mock, par).candidates);
}
