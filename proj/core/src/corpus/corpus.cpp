#include "textrl/corpus/corpus.hpp"

#include <fstream>
#include <sstream>

#include "textrl/corpus/text.hpp"
#include "textrl/errors.hpp"

namespace textrl::corpus {

Corpus ingest_transcripts(std::string_view file_bytes) {
  Corpus corpus;
  int line_no = 0;
  std::size_t begin = 0;
  while (begin < file_bytes.size()) {
    std::size_t end = file_bytes.find('\n', begin);
    std::string_view line = (end == std::string_view::npos)
                                ? file_bytes.substr(begin)
                                : file_bytes.substr(begin, end - begin);
    begin = (end == std::string_view::npos) ? file_bytes.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() && begin >= file_bytes.size()) break;  // trailing newline

    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw FormatError(line_no, "expected one TAB separating observation and action");
    if (line.find('\t', tab + 1) != std::string_view::npos)
      throw FormatError(line_no, "more than one TAB in line");
    std::string obs = normalize_text(line.substr(0, tab));
    std::string act = normalize_text(line.substr(tab + 1));
    if (obs.empty()) throw FormatError(line_no, "empty observation");
    if (act.empty()) throw FormatError(line_no, "empty action");
    corpus.pairs.emplace_back(std::move(obs), std::move(act));
  }
  return corpus;
}

Corpus ingest_transcripts_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest_transcripts(buf.str());
}

}  // namespace textrl::corpus
