#pragma once

// JSON encoding of the domain types and JSONL file helpers.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reasonmine/types.hpp"

namespace reasonmine {

using json = nlohmann::json;

void to_json(json &j, const Choice &c);
void from_json(const json &j, Choice &c);
void to_json(json &j, const QAInstance &q);
void from_json(const json &j, QAInstance &q);
void to_json(json &j, const SamplingConfig &c);
void from_json(const json &j, SamplingConfig &c);
void to_json(json &j, const Candidate &c);
void from_json(const json &j, Candidate &c);
void to_json(json &j, const FilterOutcome &o);
void from_json(const json &j, FilterOutcome &o);
void to_json(json &j, const TrainingRecord &r);
void from_json(const json &j, TrainingRecord &r);
void to_json(json &j, const JudgeScores &s);
void from_json(const json &j, JudgeScores &s);
void to_json(json &j, const Histogram &h);
void from_json(const json &j, Histogram &h);

struct JsonlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads one JSON value per non-empty line. Parse failures report the line number.
std::vector<json> read_jsonl(const std::filesystem::path &path);

/// Writes one compact JSON object per line, "\n"-terminated, UTF-8.
void write_jsonl(const std::filesystem::path &path, const std::vector<json> &rows);

template <class T>
std::vector<T> read_jsonl_as(const std::filesystem::path &path) {
  std::vector<T> out;
  for (const auto &row : read_jsonl(path)) out.push_back(row.get<T>());
  return out;
}

template <class T>
void write_jsonl_from(const std::filesystem::path &path, const std::vector<T> &items) {
  std::vector<json> rows;
  rows.reserve(items.size());
  for (const auto &item : items) rows.emplace_back(item);
  write_jsonl(path, rows);
}

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view content);

}  // namespace reasonmine
