#include "textrl/corpus/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "textrl/corpus/text.hpp"
#include "textrl/errors.hpp"

namespace textrl::corpus {

namespace {
const char* kSpecials[Vocab::kSpecialCount] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
}

Vocab::Vocab() {
  for (const char* s : kSpecials) add(s);
}

int Vocab::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, static_cast<int>(tokens_.size()));
  if (!inserted) throw std::invalid_argument("duplicate vocab token '" + token + "'");
  tokens_.push_back(token);
  return it->second;
}

int Vocab::lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::string Vocab::to_text() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocab Vocab::from_text(std::string_view text) {
  Vocab vocab;
  int line_no = 0;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    std::string_view line = (end == std::string_view::npos)
                                ? text.substr(begin)
                                : text.substr(begin, end - begin);
    begin = (end == std::string_view::npos) ? text.size() : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() && begin >= text.size()) break;
    std::string token(line);
    if (line_no < kSpecialCount) {
      if (token != kSpecials[line_no])
        throw FormatError(line_no + 1, "vocab file must start with the special tokens");
    } else {
      vocab.add(token);
    }
    ++line_no;
  }
  if (line_no < kSpecialCount)
    throw FormatError(line_no, "vocab file shorter than the special token block");
  return vocab;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocab file '" + path + "'");
  out << to_text();
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocab file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

namespace {

Vocab build_from_counts(const std::map<std::string, long>& counts, int max_size) {
  if (max_size < Vocab::kSpecialCount + 1)
    throw std::invalid_argument("vocab max_size must be at least 6");
  std::vector<std::pair<std::string, long>> entries(counts.begin(), counts.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  for (const auto& [token, count] : entries) {
    if (vocab.size() >= max_size) break;
    vocab.add(token);
  }
  return vocab;
}

}  // namespace

Vocab build_vocab(const Corpus& corpus, int max_size) {
  std::map<std::string, long> counts;
  for (const auto& [obs, act] : corpus.pairs) {
    for (const auto& tok : split_tokens(obs)) counts[tok] += 1;
    for (const auto& tok : split_tokens(act)) counts[tok] += 1;
  }
  return build_from_counts(counts, max_size);
}

Vocab build_vocab_from_texts(const std::vector<std::string>& texts, int max_size) {
  std::map<std::string, long> counts;
  for (const auto& text : texts) {
    for (const auto& tok : split_tokens(text)) counts[tok] += 1;
  }
  return build_from_counts(counts, max_size);
}

TokenSequence tokenize(const std::string& text, const Vocab& vocab) {
  TokenSequence seq;
  seq.source_text = text;
  for (const auto& tok : split_tokens(text)) seq.ids.push_back(vocab.lookup(tok));
  return seq;
}

}  // namespace textrl::corpus
