#include "reasonmine/ingestion.hpp"

#include <algorithm>
#include <set>

#include "reasonmine/serialize.hpp"
#include "reasonmine/tokenize.hpp"

namespace reasonmine::ingest {

namespace {

std::size_t line_of(const std::string &content, std::size_t byte) {
  byte = std::min(byte, content.size());
  return 1 + static_cast<std::size_t>(
                 std::count(content.begin(), content.begin() + static_cast<long>(byte), '\n'));
}

std::vector<json> parse_records(const std::filesystem::path &path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const std::exception &e) {
    throw IngestError(e.what());
  }
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};

  if (content[first] == '[' || content[first] == '{') {
    try {
      auto doc = json::parse(content);
      if (doc.is_array()) return doc.get<std::vector<json>>();
      for (const char *key : {"examples", "data"})
        if (doc.contains(key) && doc[key].is_array()) return doc[key].get<std::vector<json>>();
      if (doc.is_object()) return {doc};
    } catch (const json::parse_error &e) {
      // A top-level object followed by more lines is JSONL; fall through.
      if (content[first] == '[')
        throw IngestError(path.string() + ":" + std::to_string(line_of(content, e.byte)) +
                          ": malformed JSON: " + e.what());
    }
  }
  try {
    return read_jsonl(path);
  } catch (const JsonlError &e) {
    throw IngestError(std::string("malformed JSON: ") + e.what());
  }
}

std::optional<std::string> yes_no(const json &answer) {
  if (answer.is_boolean()) return answer.get<bool>() ? "yes" : "no";
  if (answer.is_string()) {
    const auto s = to_lower(trim(answer.get<std::string>()));
    if (s == "yes" || s == "true") return "yes";
    if (s == "no" || s == "false") return "no";
  }
  return std::nullopt;
}

void check_count(LoadResult &r, Dataset d, std::string_view split) {
  if (auto n = expected_count(d, split); n && *n != r.instances.size())
    r.warnings.push_back(std::string(to_string(d)) + " " + std::string(split) + ": loaded " +
                         std::to_string(r.instances.size()) + " instances, published split has " +
                         std::to_string(*n));
}

bool add_unique(LoadResult &r, std::set<std::string> &ids, QAInstance inst) {
  if (!ids.insert(inst.id).second) {
    r.warnings.push_back("duplicate id " + inst.id + " skipped");
    return false;
  }
  r.instances.push_back(std::move(inst));
  return true;
}

}  // namespace

std::optional<std::size_t> expected_count(Dataset dataset, std::string_view split) {
  if (dataset == Dataset::StrategyQA) {
    if (split == "train") return 1603;
    if (split == "test") return 687;
  } else {
    if (split == "train") return 9741;
    if (split == "test" || split == "dev" || split == "validation") return 1221;
  }
  return std::nullopt;
}

LoadResult load_strategyqa(const std::filesystem::path &path, std::string_view split) {
  LoadResult r;
  std::set<std::string> ids;
  const auto records = parse_records(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &rec = records[i];
    const auto where = path.filename().string() + " item " + std::to_string(i);
    if (!rec.is_object() || !rec.contains("question") || !rec["question"].is_string() ||
        !rec.contains("answer")) {
      r.warnings.push_back(where + ": missing question/answer, skipped");
      continue;
    }
    auto label = yes_no(rec["answer"]);
    if (!label) {
      r.warnings.push_back(where + ": answer is not a boolean, skipped");
      continue;
    }
    QAInstance inst;
    inst.dataset = Dataset::StrategyQA;
    inst.id = rec.contains("qid") && rec["qid"].is_string() ? rec["qid"].get<std::string>()
                                                            : std::string(split) + "-" + std::to_string(i);
    inst.question = trim(rec["question"].get<std::string>());
    inst.answer = *label;
    if (auto errs = validate(inst); !errs.empty()) {
      r.warnings.push_back(where + ": " + errs.front() + ", skipped");
      continue;
    }
    add_unique(r, ids, std::move(inst));
  }
  check_count(r, Dataset::StrategyQA, split);
  return r;
}

LoadResult load_commonsenseqa(const std::filesystem::path &path, std::string_view split) {
  LoadResult r;
  std::set<std::string> ids;
  const auto records = parse_records(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &rec = records[i];
    const auto where = path.filename().string() + " item " + std::to_string(i);
    try {
      QAInstance inst;
      inst.dataset = Dataset::CommonsenseQA;
      inst.id = rec.contains("id") ? rec.at("id").get<std::string>()
                                   : std::string(split) + "-" + std::to_string(i);
      const auto &q = rec.at("question");
      inst.question = trim(q.at("stem").get<std::string>());
      std::vector<Choice> choices;
      for (const auto &c : q.at("choices"))
        choices.push_back({trim(c.at("label").get<std::string>()), trim(c.at("text").get<std::string>())});
      if (choices.size() != 5) {
        r.warnings.push_back(where + ": " + std::to_string(choices.size()) + " choices, skipped");
        continue;
      }
      for (auto &c : choices)
        for (auto &ch : c.letter) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      std::stable_sort(choices.begin(), choices.end(),
                       [](const Choice &a, const Choice &b) { return a.letter < b.letter; });
      inst.choices = std::move(choices);
      inst.answer = trim(rec.at("answerKey").get<std::string>());
      for (auto &ch : inst.answer) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (auto errs = validate(inst); !errs.empty()) {
        r.warnings.push_back(where + ": " + errs.front() + ", skipped");
        continue;
      }
      add_unique(r, ids, std::move(inst));
    } catch (const json::exception &e) {
      r.warnings.push_back(where + ": " + e.what() + ", skipped");
    }
  }
  check_count(r, Dataset::CommonsenseQA, split);
  return r;
}

LoadResult load(Dataset dataset, const std::filesystem::path &path, std::string_view split) {
  return dataset == Dataset::StrategyQA ? load_strategyqa(path, split)
                                        : load_commonsenseqa(path, split);
}

}  // namespace reasonmine::ingest
