#include "textrl/corpus/text.hpp"

#include <cctype>

namespace textrl::corpus {

namespace {
bool is_detached_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '\'': case '"': case '(': case ')':
      return true;
    default:
      return false;
  }
}
}  // namespace

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      out.push_back(word);
      word.clear();
    }
  };
  for (char raw : text) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_detached_punct(c)) {
      flush();
      out.push_back(std::string(1, c));
    } else {
      word.push_back(c);
    }
  }
  flush();
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  for (const std::string& tok : split_tokens(text)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

}  // namespace textrl::corpus
