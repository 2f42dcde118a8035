#include <doctest.h>

#include "oracles.hpp"
#include "reasonmine/serialize.hpp"
#include "reasonmine/types.hpp"

using namespace reasonmine;

namespace {
QAInstance csqa_instance() {
  QAInstance q;
  q.id = "c1";
  q.question = "Where do fish live?";
  q.answer = "B";
  q.dataset = Dataset::CommonsenseQA;
  q.choices = std::vector<Choice>{{"A", "desert"}, {"B", "sea"}, {"C", "sky"}, {"D", "tree"}, {"E", "road"}};
  return q;
}
}  // namespace

TEST_CASE("QAInstance validation") {
  QAInstance ok{"s1", "Do fish sleep?", "yes", std::nullopt, Dataset::StrategyQA};
  CHECK(validate(ok).empty());
  CHECK(validate(csqa_instance()).empty());

  auto bad = ok;
  bad.answer = "maybe";
  CHECK_FALSE(validate(bad).empty());
  bad = ok;
  bad.question = "";
  CHECK_FALSE(validate(bad).empty());

  auto four = csqa_instance();
  four.choices->pop_back();
  CHECK_FALSE(validate(four).empty());
  auto wrong_key = csqa_instance();
  wrong_key.answer = "F";
  CHECK_FALSE(validate(wrong_key).empty());
}

TEST_CASE("SamplingConfig defaults and validation") {
  SamplingConfig cfg;
  CHECK(cfg.branch_k == 5);
  CHECK(cfg.samples_per_branch == 5);
  CHECK(cfg.top_p == 0.95);
  CHECK(cfg.top_k == 10);
  CHECK(cfg.candidates_per_question() == 25);
  CHECK(validate(cfg).empty());
  cfg.top_p = 0.0;
  CHECK_FALSE(validate(cfg).empty());
  cfg = {};
  cfg.branch_k = 0;
  CHECK_FALSE(validate(cfg).empty());
}

TEST_CASE("Candidate validation checks token and logprob alignment") {
  auto c = oracle::candidate("q", 0, 0, oracle::distinct_words(5), -1.0);
  CHECK(validate(c).empty());
  c.token_logprobs.pop_back();
  CHECK_FALSE(validate(c).empty());
  c = oracle::candidate("q", 0, 0, oracle::distinct_words(5), -1.0);
  c.token_logprobs[2] = 0.3;
  CHECK_FALSE(validate(c).empty());
}

TEST_CASE("JudgeScores average and range") {
  const auto s = JudgeScores::from_criteria(8, 7, 9, 8);
  CHECK(s.average == 8.0);
  CHECK(validate(s).empty());
  auto bad = s;
  bad.average = 5.0;
  CHECK_FALSE(validate(bad).empty());
  bad = s;
  bad.coherence = 11;
  CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("FilterOutcome and TrainingRecord validation") {
  FilterOutcome o;
  o.selected = true;
  CHECK_FALSE(validate(o).empty());  // selected without passing
  o.pattern_pass = o.length_pass = o.rep2_pass = o.ppl_pass = true;
  CHECK(validate(o).empty());

  TrainingRecord r{RecordKind::SelfTrain, "q", "Question: x Answer: y So the answer is yes", "y", "yes"};
  CHECK(validate(r).empty());
  r.text = "Question: x Answer: y";
  CHECK_FALSE(validate(r).empty());
}

TEST_CASE("prompt_question appends CommonsenseQA choices") {
  CHECK(prompt_question(csqa_instance()) ==
        "Where do fish live? Answer Choices: (A) desert (B) sea (C) sky (D) tree (E) road");
  QAInstance s{"s", "Do fish sleep?", "yes", std::nullopt, Dataset::StrategyQA};
  CHECK(prompt_question(s) == "Do fish sleep?");
}

TEST_CASE("enum string round-trips") {
  for (auto d : {Dataset::StrategyQA, Dataset::CommonsenseQA}) CHECK(parse_dataset(to_string(d)) == d);
  for (auto r : {FinishReason::Length, FinishReason::Stop}) CHECK(parse_finish_reason(to_string(r)) == r);
  for (auto k : {RecordKind::SelfTrain, RecordKind::Distill}) CHECK(parse_record_kind(to_string(k)) == k);
  for (auto m : {HistogramMode::PerOutput, HistogramMode::PerQuestionAny})
    CHECK(parse_histogram_mode(to_string(m)) == m);
  CHECK_FALSE(parse_dataset("squad").has_value());
}

TEST_CASE("JSON round-trip of every domain type") {
  const auto q = csqa_instance();
  CHECK(json(q).get<QAInstance>() == q);

  SamplingConfig cfg;
  cfg.seed = 42;
  CHECK(json(cfg).get<SamplingConfig>() == cfg);

  auto c = oracle::candidate("q\"1", 2, 3, {"quote\"d", "new\nline", "ünï"}, -0.25);
  c.finish_reason = FinishReason::Length;
  CHECK(json::parse(json(c).dump()).get<Candidate>() == c);

  FilterOutcome o{"q", 1, 2, 30, true, false, 0.1, true, 6.5, true, false};
  CHECK(json(o).get<FilterOutcome>() == o);

  TrainingRecord r{RecordKind::Distill, "q", "text \"x\"", "r", "yes"};
  CHECK(json(r).get<TrainingRecord>() == r);

  const auto s = JudgeScores::from_criteria(1, 2, 3, 4.5);
  CHECK(json(s).get<JudgeScores>() == s);

  Histogram h;
  h.values = {0.1, 0.2, 0.3, 0.4, 0.0};
  h.mode = HistogramMode::PerQuestionAny;
  CHECK(json(h).get<Histogram>() == h);
}

TEST_CASE("JSONL helpers") {
  oracle::TempDir dir("jsonl");
  const auto path = dir.path / "sub" / "rows.jsonl";
  std::vector<json> rows{json{{"a", 1}}, json{{"b", "x\ny"}}};
  write_jsonl(path, rows);
  CHECK(read_file(path) == "{\"a\":1}\n{\"b\":\"x\\ny\"}\n");
  CHECK(read_jsonl(path) == rows);

  write_jsonl(path, {});
  CHECK(read_file(path).empty());
  CHECK(read_jsonl(path).empty());

  write_file(path, "{\"a\":1}\n\n{broken\n");
  try {
    read_jsonl(path);
    FAIL("expected JsonlError");
  } catch (const JsonlError &e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}
