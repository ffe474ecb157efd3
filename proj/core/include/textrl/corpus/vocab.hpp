#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "textrl/corpus/corpus.hpp"

namespace textrl::corpus {

struct TokenSequence {
  std::vector<int> ids;
  std::string source_text;

  std::size_t size() const { return ids.size(); }
};

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kMask = 4;
  static constexpr int kSpecialCount = 5;

  Vocab();  // specials only

  // Appends a regular token; returns its id. Duplicates are rejected.
  int add(const std::string& token);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  // Unknown tokens map to kUnk.
  int lookup(const std::string& token) const;
  bool is_special(int id) const { return id >= 0 && id < kSpecialCount; }

  void save(const std::string& path) const;
  static Vocab load(const std::string& path);
  std::string to_text() const;               // one token per line
  static Vocab from_text(std::string_view);  // line number = id

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Specials first, then corpus tokens by descending frequency (ties broken
// lexicographically), truncated to max_size total entries.
Vocab build_vocab(const Corpus& corpus, int max_size);

// Same ordering rule over an arbitrary bag of text fragments.
Vocab build_vocab_from_texts(const std::vector<std::string>& texts, int max_size);

// Lowercase + whitespace/punctuation split, ids via the vocab (OOV -> [UNK]).
TokenSequence tokenize(const std::string& text, const Vocab& vocab);

}  // namespace textrl::corpus
