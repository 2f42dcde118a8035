#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "reasonmine/filter_cascade.hpp"
#include "reasonmine/text_metrics.hpp"

using namespace reasonmine;

namespace {
const double kLnFifth = std::log(0.2);  // perplexity exactly 5
const double kFluent = std::log(0.1);   // perplexity 10
}  // namespace

TEST_CASE("pattern stage flags QA-pair imitation") {
  CHECK(filter::imitates_qa_format(" Yes. Question: Is ice cold? Answer: yes"));
  CHECK_FALSE(filter::imitates_qa_format(" The answer: it is cold. Question: why?"));
  CHECK_FALSE(filter::imitates_qa_format(" Fish rest at night."));
  CHECK_FALSE(filter::imitates_qa_format(" Question: what now?"));

  auto c = oracle::candidate("q", 0, 0, oracle::distinct_words(30), kFluent);
  c.text = " Yes. Question: Is ice cold? Answer: yes";
  CHECK_FALSE(filter::stage_verdicts(c).pattern_pass);
}

TEST_CASE("length stage: fewer than 25 tokens rejected, 25 kept") {
  CHECK_FALSE(filter::stage_verdicts(oracle::candidate("q", 0, 0, oracle::distinct_words(24), kFluent)).length_pass);
  CHECK(filter::stage_verdicts(oracle::candidate("q", 0, 0, oracle::distinct_words(25), kFluent)).length_pass);
}

TEST_CASE("repetition stage: above 0.20 rejected, 0.20 kept") {
  const auto at = oracle::candidate("q", 0, 0, oracle::words_with_repeated_bigrams(101, 20), kFluent);
  const auto above = oracle::candidate("q", 0, 0, oracle::words_with_repeated_bigrams(101, 21), kFluent);
  CHECK(filter::stage_verdicts(at).rep2 == doctest::Approx(0.20));
  CHECK(filter::stage_verdicts(at).rep2_pass);
  CHECK_FALSE(filter::stage_verdicts(above).rep2_pass);

  // 30 tokens with rep2 = 0.25 is not representable over 29 bigrams; use 41 tokens, 10 repeats.
  const auto quarter = oracle::candidate("q", 0, 0, oracle::words_with_repeated_bigrams(41, 10), kFluent);
  CHECK(filter::stage_verdicts(quarter).rep2 == doctest::Approx(0.25));
  CHECK_FALSE(filter::stage_verdicts(quarter).rep2_pass);
}

TEST_CASE("perplexity stage: below 5 rejected, 5 kept") {
  const auto at = oracle::candidate("q", 0, 0, oracle::distinct_words(30), kLnFifth);
  CHECK(filter::stage_verdicts(at).ppl_pass);
  const auto below = oracle::candidate("q", 0, 0, oracle::distinct_words(30), -std::log(4.99));
  CHECK_FALSE(filter::stage_verdicts(below).ppl_pass);
}

TEST_CASE("all stages are computed without short-circuit") {
  auto c = oracle::candidate("q", 0, 0, {"a", "a", "a", "a"}, -0.01);
  c.text = " Question: a Answer: a";
  const auto o = filter::stage_verdicts(c);
  CHECK_FALSE(o.pattern_pass);
  CHECK_FALSE(o.length_pass);
  CHECK_FALSE(o.rep2_pass);
  CHECK_FALSE(o.ppl_pass);
  CHECK(o.token_count == 4);
  CHECK(o.rep2 == doctest::Approx(2.0 / 3.0));
  CHECK(o.perplexity == doctest::Approx(std::exp(0.01)));
  CHECK_FALSE(o.selected);
}

TEST_CASE("select_best picks minimal rep2 with index tie-break") {
  auto survivor = [](int b, int s, double rep2) {
    FilterOutcome o;
    o.question_id = "q";
    o.branch_index = b;
    o.sample_index = s;
    o.pattern_pass = o.length_pass = o.rep2_pass = o.ppl_pass = true;
    o.rep2 = rep2;
    o.perplexity = 6.0;
    return o;
  };
  std::vector<FilterOutcome> v{survivor(0, 0, 0.10), survivor(0, 1, 0.05), survivor(1, 0, 0.18)};
  auto best = filter::select_best(v);
  REQUIRE(best);
  CHECK(best->sample_index == 1);
  CHECK(best->selected);

  std::vector<FilterOutcome> tie{survivor(2, 0, 0.10), survivor(0, 1, 0.10)};
  best = filter::select_best(tie);
  REQUIRE(best);
  CHECK(best->branch_index == 0);
  CHECK(best->sample_index == 1);

  auto failing = survivor(0, 0, 0.0);
  failing.ppl_pass = false;
  CHECK_FALSE(filter::select_best(std::vector<FilterOutcome>{failing}).has_value());
  CHECK_FALSE(filter::select_best(std::vector<FilterOutcome>{}).has_value());
}

TEST_CASE("run_cascade covers every candidate and selects at most one per question") {
  std::vector<Candidate> cands;
  for (int i = 0; i < 25; ++i) {
    const bool survive = i == 3 || i == 11 || i == 20;
    const int repeats = i == 11 ? 2 : (i == 20 ? 4 : 6);
    cands.push_back(oracle::candidate("q", i / 5, i % 5,
                                      survive ? oracle::words_with_repeated_bigrams(40, repeats)
                                              : oracle::distinct_words(10),
                                      kFluent));
  }
  const auto r = filter::run_cascade(cands);
  CHECK(r.outcomes.size() == 25);
  CHECK(std::count_if(r.outcomes.begin(), r.outcomes.end(), [](auto &o) { return o.passes_all(); }) == 3);
  REQUIRE(r.selected.size() == 1);
  CHECK(r.selected.at("q").branch_index == 2);
  CHECK(r.selected.at("q").sample_index == 1);
  CHECK(std::count_if(r.outcomes.begin(), r.outcomes.end(), [](auto &o) { return o.selected; }) == 1);
  CHECK(r.outcomes[11].selected);

  CHECK(filter::run_cascade(std::vector<Candidate>{}).outcomes.empty());

  std::vector<Candidate> junk(5, oracle::candidate("j", 0, 0, {"x", "y"}, kFluent));
  for (int i = 0; i < 5; ++i) junk[i].sample_index = i;
  const auto jr = filter::run_cascade(junk);
  CHECK(jr.selected.empty());
  for (const auto &o : jr.outcomes) CHECK_FALSE(o.length_pass);
}

namespace {
std::vector<Candidate> random_corpus(std::mt19937_64 &rng, int questions, int per_question) {
  std::uniform_int_distribution<int> len(10, 60), alpha(3, 40);
  std::uniform_real_distribution<double> lp(-3.0, -0.5);
  std::vector<Candidate> out;
  for (int q = 0; q < questions; ++q)
    for (int i = 0; i < per_question; ++i) {
      auto toks = oracle::random_tokens(rng, len(rng), alpha(rng));
      Candidate c = oracle::candidate("q" + std::to_string(q), i / 5, i % 5, toks, 0.0);
      for (auto &x : c.token_logprobs) x = lp(rng);
      out.push_back(std::move(c));
    }
  return out;
}
}  // namespace

TEST_CASE("verdicts and selection are permutation-invariant") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto corpus = random_corpus(rng, 3, 25);
    const auto base = filter::run_cascade(corpus);
    auto shuffled = corpus;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = filter::run_cascade(shuffled);

    auto key = [](const FilterOutcome &o) { return std::tuple(o.question_id, o.branch_index, o.sample_index); };
    auto a = base.outcomes, b = perm.outcomes;
    std::sort(a.begin(), a.end(), [&](auto &x, auto &y) { return key(x) < key(y); });
    std::sort(b.begin(), b.end(), [&](auto &x, auto &y) { return key(x) < key(y); });
    CHECK(a == b);
    CHECK(base.selected == perm.selected);
  }
}

TEST_CASE("tightening a threshold never grows the survivor set") {
  std::mt19937_64 rng(2024);
  const auto corpus = random_corpus(rng, 4, 25);
  auto survivors = [&](const filter::Thresholds &th) {
    std::set<std::size_t> s;
    const auto r = filter::run_cascade(corpus, th);
    for (std::size_t i = 0; i < r.outcomes.size(); ++i)
      if (r.outcomes[i].passes_all()) s.insert(i);
    return s;
  };
  auto subset = [](const std::set<std::size_t> &a, const std::set<std::size_t> &b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  filter::Thresholds loose{10, 0.5, 2.0};
  auto prev = survivors(loose);
  for (int step = 0; step < 10; ++step) {
    filter::Thresholds tight = loose;
    tight.min_tokens += 4 * step;
    auto s = survivors(tight);
    CHECK(subset(s, prev));
    prev = s;
  }
  prev = survivors(loose);
  for (double rep = 0.5; rep >= 0.0; rep -= 0.05) {
    auto s = survivors({10, rep, 2.0});
    CHECK(subset(s, prev));
    prev = s;
  }
  prev = survivors(loose);
  for (double ppl = 2.0; ppl <= 20.0; ppl += 1.5) {
    auto s = survivors({10, 0.5, ppl});
    CHECK(subset(s, prev));
    prev = s;
  }
}
