#include <doctest.h>

#include "oracles.hpp"
#include "reasonmine/ingestion.hpp"
#include "reasonmine/serialize.hpp"

using namespace reasonmine;

TEST_CASE("StrategyQA: JSON array with boolean answers") {
  oracle::TempDir dir("sqa");
  const auto path = dir.path / "train.json";
  write_file(path, R"([{"qid":"a1","question":"Do fish sleep?","answer":true,"facts":["x"]},
                       {"qid":"a2","question":"Is lava cold?","answer":false}])");
  const auto r = ingest::load_strategyqa(path, "train");
  REQUIRE(r.instances.size() == 2);
  CHECK(r.instances[0].id == "a1");
  CHECK(r.instances[0].answer == "yes");
  CHECK(r.instances[1].answer == "no");
  CHECK(r.instances[0].dataset == Dataset::StrategyQA);
  CHECK(r.warnings.size() == 1);  // count differs from the published split
  for (const auto &q : r.instances) CHECK(validate(q).empty());

  // Idempotent and order-stable.
  CHECK(ingest::load_strategyqa(path, "train").instances == r.instances);
}

TEST_CASE("StrategyQA: JSONL and wrapped layouts, ids from position when absent") {
  oracle::TempDir dir("sqa2");
  write_file(dir.path / "a.jsonl", "{\"question\":\"Q1?\",\"answer\":true}\n{\"question\":\"Q2?\",\"answer\":\"no\"}\n");
  const auto jl = ingest::load_strategyqa(dir.path / "a.jsonl", "test");
  REQUIRE(jl.instances.size() == 2);
  CHECK(jl.instances[1].answer == "no");
  CHECK(jl.instances[0].id != jl.instances[1].id);

  write_file(dir.path / "b.json", R"({"examples":[{"question":"Q?","answer":false}]})");
  CHECK(ingest::load_strategyqa(dir.path / "b.json", "test").instances.size() == 1);
}

TEST_CASE("StrategyQA: malformed JSON reports the line") {
  oracle::TempDir dir("sqa3");
  write_file(dir.path / "bad.json", "[\n{\"question\":\"Q?\",\n\"answer\": tru}\n]");
  try {
    ingest::load_strategyqa(dir.path / "bad.json", "train");
    FAIL("expected IngestError");
  } catch (const ingest::IngestError &e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest::load_strategyqa(dir.path / "missing.json", "train"), ingest::IngestError);
}

TEST_CASE("CommonsenseQA: choices re-sorted by label, bad items skipped") {
  oracle::TempDir dir("csqa");
  const auto path = dir.path / "dev.jsonl";
  write_file(path,
             R"({"id":"c1","answerKey":"B","question":{"stem":"Where do fish live?","choices":[{"label":"C","text":"sky"},{"label":"A","text":"desert"},{"label":"E","text":"road"},{"label":"B","text":"sea"},{"label":"D","text":"tree"}]}})"
             "\n"
             R"({"id":"c2","answerKey":"a","question":{"stem":"Four?","choices":[{"label":"A","text":"1"},{"label":"B","text":"2"},{"label":"C","text":"3"},{"label":"D","text":"4"}]}})"
             "\n");
  const auto r = ingest::load_commonsenseqa(path, "dev");
  REQUIRE(r.instances.size() == 1);
  const auto &q = r.instances[0];
  CHECK(q.answer == "B");
  REQUIRE(q.choices);
  CHECK((*q.choices)[0] == Choice{"A", "desert"});
  CHECK((*q.choices)[1] == Choice{"B", "sea"});
  CHECK((*q.choices)[4] == Choice{"E", "road"});
  CHECK(validate(q).empty());
  CHECK(r.warnings.size() == 2);  // skipped item + count mismatch
}

TEST_CASE("expected split sizes") {
  CHECK(ingest::expected_count(Dataset::StrategyQA, "train") == 1603u);
  CHECK(ingest::expected_count(Dataset::StrategyQA, "test") == 687u);
  CHECK(ingest::expected_count(Dataset::CommonsenseQA, "train") == 9741u);
  CHECK(ingest::expected_count(Dataset::CommonsenseQA, "test") == 1221u);
  CHECK(ingest::expected_count(Dataset::CommonsenseQA, "dev") == 1221u);
  CHECK_FALSE(ingest::expected_count(Dataset::StrategyQA, "other").has_value());
}
