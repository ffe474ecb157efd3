#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace textrl::corpus {

// Lowercases, splits on whitespace and detaches .,!?;:'"() as single-character
// tokens. Empty input yields an empty list.
std::vector<std::string> split_tokens(std::string_view text);

// split_tokens joined with single spaces.
std::string normalize_text(std::string_view text);

}  // namespace textrl::corpus
