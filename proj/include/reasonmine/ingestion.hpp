#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reasonmine/types.hpp"

namespace reasonmine::ingest {

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadResult {
  std::vector<QAInstance> instances;
  std::vector<std::string> warnings;
};

/// Split sizes of the published files: StrategyQA 1603/687,
/// CommonsenseQA 9741 train and 1221 dev (used as test).
std::optional<std::size_t> expected_count(Dataset dataset, std::string_view split);

/// StrategyQA: a JSON array (or {"examples": [...]}, or JSONL) of objects with
/// `question` and a boolean `answer`. Ids come from `qid` when present.
LoadResult load_strategyqa(const std::filesystem::path &path, std::string_view split);

/// CommonsenseQA JSONL: {id, answerKey, question: {stem, choices: [{label, text}]}}.
/// Choices are re-sorted by label; items without exactly five choices are skipped.
LoadResult load_commonsenseqa(const std::filesystem::path &path, std::string_view split);

LoadResult load(Dataset dataset, const std::filesystem::path &path, std::string_view split);

}  // namespace reasonmine::ingest
