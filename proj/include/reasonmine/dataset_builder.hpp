#pragma once

// Training-text rendering for self-training and teacher distillation.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reasonmine/backend.hpp"
#include "reasonmine/types.hpp"

namespace reasonmine::dataset {

struct RenderOptions {
  // Render "Let’s" with U+2019 instead of ASCII U+0027.
  bool unicode_apostrophe = false;
};

/// "Question: q[.] Answer: r So the answer is a". The period after q is added
/// only when q does not already end in '.', '?' or '!'. r is trimmed.
/// Throws std::invalid_argument("empty reasoning") when r is blank.
TrainingRecord render_self_train(std::string_view question, std::string_view reasoning,
                                 std::string_view answer, std::string_view question_id = {});

/// "Question: q[.] Answer: Let's think step by step."
std::string render_teacher_prompt(std::string_view question, const RenderOptions &opts = {});

/// Teacher prompt followed by " R So the answer is a".
TrainingRecord render_distill(std::string_view question, std::string_view teacher_reasoning,
                              std::string_view answer, std::string_view question_id = {},
                              const RenderOptions &opts = {});

struct TeacherRecord {
  std::string question_id;
  std::string question;   // as rendered into the prompt
  std::string reasoning;  // trimmed teacher completion
  std::string answer;

  bool operator==(const TeacherRecord &) const = default;
};

void to_json(nlohmann::json &j, const TeacherRecord &r);
void from_json(const nlohmann::json &j, TeacherRecord &r);

struct HarvestOptions {
  int max_tokens = 256;
  double temperature = 0.0;
  std::size_t workers = 1;
  RenderOptions render;
};

struct HarvestResult {
  std::vector<TeacherRecord> records;  // input order; failed items dropped
  std::vector<std::string> warnings;
};

/// One teacher completion per instance. Transport failures and empty
/// completions drop the item with a warning.
HarvestResult harvest_teacher(std::span<const QAInstance> instances, Backend &teacher,
                              const HarvestOptions &opts = {});

/// One JSON object per line with {kind, question_id, text, reasoning, answer},
/// ordered by question_id.
void emit_jsonl(std::vector<TrainingRecord> records, const std::filesystem::path &path);
std::vector<TrainingRecord> read_records(const std::filesystem::path &path);

}  // namespace reasonmine::dataset
