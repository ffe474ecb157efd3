#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace textrl::corpus {

// Observation/action pairs, whitespace-normalized and lowercased, in file
// order.
struct Corpus {
  std::vector<std::pair<std::string, std::string>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Parses `observation<TAB>action` lines. Throws FormatError with the line
// number when a line does not have exactly one TAB or either side is empty
// after trimming.
Corpus ingest_transcripts(std::string_view file_bytes);

Corpus ingest_transcripts_file(const std::string& path);

}  // namespace textrl::corpus
