#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "reasonmine/judge.hpp"
#include "reasonmine/mock_backend.hpp"
#include "reasonmine/serialize.hpp"

using namespace reasonmine;

TEST_CASE("judge prompt matches the golden file") {
  const auto golden = read_file(std::string(GOLDEN_DIR) + "/judge_prompt.txt");
  CHECK(judge::render_judge_prompt("Do fish sleep?", "Fish rest with {eyes} open. So the answer is yes") == golden);
}

TEST_CASE("judge prompt substitution keeps every score line") {
  const auto p = judge::render_judge_prompt("{eval_question}", "{eval_completion} {{x}}");
  for (auto c : judge::kCriteria)
    CHECK(p.find("- Score for " + std::string(c) + ": [Insert score here]") != std::string::npos);
  CHECK(p.find("Response: \"{eval_completion} {{x}}\"") != std::string::npos);
}

TEST_CASE("parse_judge fixtures") {
  const auto s = judge::parse_judge(
      "Score for Coherence: 8 and Score for Relevance: 7\nScore for Logical Consistency: 9\n"
      "Score for Completeness: 8");
  CHECK(s.scores == JudgeScores::from_criteria(8, 7, 9, 8));
  CHECK(s.scores.average == 8.0);

  const auto bracket = judge::parse_judge(
      "Score for Coherence: [10]\nScore for Relevance: [7.5]\nScore for Logical Consistency: **9**\n"
      "Score for Completeness: 6/10");
  CHECK(bracket.scores.coherence == 10);
  CHECK(bracket.scores.relevance == 7.5);
  CHECK(bracket.scores.logical_consistency == 9);
  CHECK(bracket.scores.completeness == 6);

  const auto clamped = judge::parse_judge(
      "Score for Coherence: 12\nScore for Relevance: 7\nScore for Logical Consistency: 9\nScore for Completeness: 8");
  CHECK(clamped.scores.coherence == 10);
  CHECK(clamped.warnings.size() == 1);

  // An echoed placeholder does not borrow the next line's list number.
  const auto echoed = judge::parse_judge(
      "- Score for Coherence: [Insert score here]\n2. Relevance\n"
      "Final: Score for Coherence: 6\nScore for Relevance: 5\nScore for Logical Consistency: 4\nScore for Completeness: 3");
  CHECK(echoed.scores == JudgeScores::from_criteria(6, 5, 4, 3));
}

TEST_CASE("parse_judge recovers oracle-rendered scores") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> cents(0, 1000);
  for (int i = 0; i < 100; ++i) {
    const double a = cents(rng) / 100.0, b = cents(rng) / 100.0, c = cents(rng) / 100.0, d = cents(rng) / 100.0;
    const auto parsed = judge::parse_judge(oracle::judge_reply(a, b, c, d, i));
    CHECK(parsed.scores.coherence == a);
    CHECK(parsed.scores.relevance == b);
    CHECK(parsed.scores.logical_consistency == c);
    CHECK(parsed.scores.completeness == d);
    CHECK(std::abs(parsed.scores.average - (a + b + c + d) / 4.0) <= 1e-9);
  }
}

TEST_CASE("malformed replies raise JudgeParseError with the raw text") {
  const std::vector<std::string> bad{
      "The response is coherent and relevant. Overall 8/10.",
      "Score for Coherence: 8\nScore for Relevance: 7\nScore for Logical Consistency: 9\n",
      "Score for Coherence: [Insert score here]\nScore for Relevance: [Insert score here]\n"
      "Score for Logical Consistency: [Insert score here]\nScore for Completeness: [Insert score here]",
  };
  for (const auto &reply : bad) {
    try {
      judge::parse_judge(reply);
      FAIL("expected JudgeParseError");
    } catch (const judge::JudgeParseError &e) {
      CHECK(std::string(e.what()) == "unparseable judge reply");
      CHECK(e.raw == reply);
    }
  }
}

TEST_CASE("judge::score retries once, then leaves the item unscored") {
  const auto prompt = judge::render_judge_prompt("Q?", "C.");

  MockBackend retry_ok("judge");
  retry_ok.script_chat(prompt, {"no scores here", oracle::judge_reply(1, 2, 3, 4)});
  auto o = judge::score(retry_ok, "Q?", "C.");
  REQUIRE(o.scores);
  CHECK(o.scores->average == 2.5);
  CHECK(o.attempts == 2);
  CHECK(o.warnings.size() == 1);

  MockBackend never("judge");
  never.script_chat(prompt, {"garbage"});
  o = judge::score(never, "Q?", "C.");
  CHECK_FALSE(o.scores);
  CHECK(o.attempts == 2);

  MockBackend down("judge");
  down.fail_prompt(prompt);
  o = judge::score(down, "Q?", "C.");
  CHECK_FALSE(o.scores);

  MockBackend fine("judge", 4);
  o = judge::score(fine, "Q?", "C.");
  REQUIRE(o.scores);
  CHECK(validate(*o.scores).empty());
  CHECK(o.attempts == 1);
}
