#include <doctest.h>

#include "oracles.hpp"
#include "reasonmine/branch_sampler.hpp"
#include "reasonmine/dataset_builder.hpp"
#include "reasonmine/mock_backend.hpp"
#include "reasonmine/serialize.hpp"

using namespace reasonmine;

TEST_CASE("template goldens match byte for byte") {
  const auto goldens = json::parse(read_file(std::string(GOLDEN_DIR) + "/templates.json"));
  REQUIRE(goldens.size() >= 10);
  for (const auto &g : goldens) {
    const auto op = g.at("op").get<std::string>();
    const auto q = g.at("q").get<std::string>();
    const auto expected = g.at("expected").get<std::string>();
    dataset::RenderOptions opts{g.value("unicode_apostrophe", false)};
    std::string got;
    if (op == "self_train")
      got = dataset::render_self_train(q, g.at("r").get<std::string>(), g.at("a").get<std::string>()).text;
    else if (op == "distill")
      got = dataset::render_distill(q, g.at("r").get<std::string>(), g.at("a").get<std::string>(), {}, opts).text;
    else if (op == "teacher_prompt")
      got = dataset::render_teacher_prompt(q, opts);
    else if (op == "mining_prompt")
      got = sampler::render_mining_prompt(q);
    INFO(g.at("name").get<std::string>());
    CHECK(got == expected);
  }
}

TEST_CASE("render errors and record fields") {
  CHECK_THROWS_WITH_AS(dataset::render_self_train("q?", "  \n", "yes"), "empty reasoning", std::invalid_argument);
  CHECK_THROWS_AS(dataset::render_distill("q?", "", "yes"), std::invalid_argument);

  const auto r = dataset::render_self_train("Do fish sleep?", " Fish rest. ", "yes", "s1");
  CHECK(r.kind == RecordKind::SelfTrain);
  CHECK(r.question_id == "s1");
  CHECK(r.reasoning == "Fish rest.");
  CHECK(r.answer == "yes");
  CHECK(validate(r).empty());

  const auto yes = dataset::render_distill("Do fish sleep?", "Fish do rest.", "yes", "s1");
  const auto no = dataset::render_distill("Do fish sleep?", "Fish do rest.", "no", "s1");
  CHECK(yes.kind == RecordKind::Distill);
  CHECK(yes.text.substr(0, yes.text.size() - 3) == no.text.substr(0, no.text.size() - 2));
}

TEST_CASE("emit_jsonl round-trips and orders by question_id") {
  oracle::TempDir dir("emit");
  std::vector<TrainingRecord> records{
      dataset::render_self_train("B?", "Say \"hi\".", "no", "b"),
      dataset::render_self_train("A?", "Fine.", "yes", "a"),
  };
  const auto path = dir.path / "out.jsonl";
  dataset::emit_jsonl(records, path);
  const auto text = read_file(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  const auto back = dataset::read_records(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == records[1]);
  CHECK(back[1] == records[0]);
  const auto row = json::parse(text.substr(0, text.find('\n')));
  for (const char *k : {"kind", "question_id", "text", "reasoning", "answer"}) CHECK(row.contains(k));

  dataset::emit_jsonl({}, path);
  CHECK(read_file(path).empty());
  CHECK(dataset::read_records(path).empty());
}

namespace {
std::vector<QAInstance> ten_instances() {
  std::vector<QAInstance> v;
  for (int i = 0; i < 10; ++i)
    v.push_back({"q" + std::to_string(i), "Is " + std::to_string(i) + " even?", i % 2 ? "no" : "yes",
                 std::nullopt, Dataset::StrategyQA});
  return v;
}
}  // namespace

TEST_CASE("harvest_teacher uses the CoT prompt and drops failures") {
  auto instances = ten_instances();
  MockBackend teacher("teacher");
  const auto p0 = dataset::render_teacher_prompt(instances[0].question);
  teacher.script_texts(p0, {" Fish do rest. So the answer is yes. "});
  teacher.fail_prompt(dataset::render_teacher_prompt(instances[4].question));
  teacher.script_texts(dataset::render_teacher_prompt(instances[7].question), {""});

  dataset::HarvestOptions opts;
  opts.workers = 3;
  const auto r = dataset::harvest_teacher(instances, teacher, opts);
  CHECK(r.records.size() == 8);
  CHECK(r.warnings.size() == 2);
  CHECK(r.records[0].reasoning == "Fish do rest. So the answer is yes.");
  CHECK(r.records[0].answer == "yes");
  for (const auto &rec : r.records) {
    CHECK(rec.question_id != "q4");
    CHECK(rec.question_id != "q7");
  }
}

TEST_CASE("harvest_teacher fault injection: 10 instances, 1 failure, 9 records") {
  auto instances = ten_instances();
  MockBackend teacher("teacher");
  teacher.fail_prompt(dataset::render_teacher_prompt(instances[2].question));
  const auto r = dataset::harvest_teacher(instances, teacher);
  CHECK(r.records.size() == 9);
  CHECK(r.warnings.size() == 1);
}
