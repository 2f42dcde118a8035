#include "reasonmine/dataset_builder.hpp"

#include <algorithm>
#include <optional>

#include "reasonmine/parallel.hpp"
#include "reasonmine/serialize.hpp"
#include "reasonmine/tokenize.hpp"

namespace reasonmine::dataset {

namespace {

constexpr std::string_view kAsciiTrigger = "Let's think step by step.";
constexpr std::string_view kUnicodeTrigger = "Let’s think step by step.";

std::string question_head(std::string_view question) {
  std::string out = "Question: ";
  out += question;
  const char last = question.empty() ? '\0' : question.back();
  if (last != '.' && last != '?' && last != '!') out += '.';
  return out;
}

std::string answer_tail(std::string_view answer) {
  std::string out = " So the answer is ";
  out += answer;
  return out;
}

}  // namespace

TrainingRecord render_self_train(std::string_view question, std::string_view reasoning,
                                 std::string_view answer, std::string_view question_id) {
  auto r = trim(reasoning);
  if (r.empty()) throw std::invalid_argument("empty reasoning");
  TrainingRecord rec;
  rec.kind = RecordKind::SelfTrain;
  rec.question_id = std::string(question_id);
  rec.text = question_head(question) + " Answer: " + r + answer_tail(answer);
  rec.reasoning = std::move(r);
  rec.answer = std::string(answer);
  return rec;
}

std::string render_teacher_prompt(std::string_view question, const RenderOptions &opts) {
  if (question.empty()) throw std::invalid_argument("empty question");
  return question_head(question) + " Answer: " +
         std::string(opts.unicode_apostrophe ? kUnicodeTrigger : kAsciiTrigger);
}

TrainingRecord render_distill(std::string_view question, std::string_view teacher_reasoning,
                              std::string_view answer, std::string_view question_id,
                              const RenderOptions &opts) {
  auto r = trim(teacher_reasoning);
  if (r.empty()) throw std::invalid_argument("empty reasoning");
  TrainingRecord rec;
  rec.kind = RecordKind::Distill;
  rec.question_id = std::string(question_id);
  rec.text = render_teacher_prompt(question, opts) + " " + r + answer_tail(answer);
  rec.reasoning = std::move(r);
  rec.answer = std::string(answer);
  return rec;
}

void to_json(nlohmann::json &j, const TeacherRecord &r) {
  j = nlohmann::json{{"question_id", r.question_id},
                     {"question", r.question},
                     {"reasoning", r.reasoning},
                     {"answer", r.answer}};
}

void from_json(const nlohmann::json &j, TeacherRecord &r) {
  j.at("question_id").get_to(r.question_id);
  j.at("question").get_to(r.question);
  j.at("reasoning").get_to(r.reasoning);
  j.at("answer").get_to(r.answer);
}

HarvestResult harvest_teacher(std::span<const QAInstance> instances, Backend &teacher,
                              const HarvestOptions &opts) {
  CompletionParams params;
  params.max_tokens = opts.max_tokens;
  params.temperature = opts.temperature;
  params.top_p = 1.0;

  struct Item {
    std::optional<TeacherRecord> record;
    std::string warning;
  };
  auto items = ordered_parallel_map(instances.size(), opts.workers, [&](std::size_t i) {
    const auto &inst = instances[i];
    const auto question = prompt_question(inst);
    Item item;
    try {
      const auto out = teacher.complete(render_teacher_prompt(question, opts.render), params, 1);
      auto reasoning = trim(out.at(0).text);
      if (reasoning.empty()) {
        item.warning = inst.id + ": empty teacher completion, dropped";
      } else {
        item.record = TeacherRecord{inst.id, question, std::move(reasoning), inst.answer};
      }
    } catch (const BackendError &e) {
      item.warning = inst.id + ": teacher request failed, dropped: " + e.what();
    }
    return item;
  });

  HarvestResult result;
  for (auto &item : items) {
    if (item.record) result.records.push_back(std::move(*item.record));
    if (!item.warning.empty()) result.warnings.push_back(std::move(item.warning));
  }
  return result;
}

void emit_jsonl(std::vector<TrainingRecord> records, const std::filesystem::path &path) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto &a, const auto &b) { return a.question_id < b.question_id; });
  write_jsonl_from(path, records);
}

std::vector<TrainingRecord> read_records(const std::filesystem::path &path) {
  return read_jsonl_as<TrainingRecord>(path);
}

}  // namespace reasonmine::dataset
