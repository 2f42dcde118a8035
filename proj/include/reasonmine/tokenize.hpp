#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reasonmine {

/// Splits text into word pieces, each a run of leading whitespace followed by
/// a run of non-whitespace (GPT-2 style). Pieces concatenate back to the input.
/// Used where no backend tokenization is available.
std::vector<std::string> word_pieces(std::string_view text);

/// Copy of s with leading and trailing ASCII whitespace removed.
std::string trim(std::string_view s);
std::string trim_right(std::string_view s);

/// ASCII lowercase copy.
std::string to_lower(std::string_view s);

}  // namespace reasonmine
