#include "textrl/env/transcript.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "textrl/env/engine.hpp"

namespace textrl::env {

namespace {

// Two decimals with the trailing zero trimmed: 9.0733 -> "9.07", 6.80 -> "6.8".
std::string format_q(double q) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", q);
  std::string s(buf);
  if (s.size() >= 2 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

}  // namespace

std::string record_transcript(const std::vector<TranscriptStep>& episode) {
  if (episode.empty()) throw std::invalid_argument("transcript of empty episode");
  std::ostringstream out;
  for (std::size_t i = 0; i < episode.size(); ++i) {
    const TranscriptStep& s = episode[i];
    if (i > 0) out << "\n";
    out << "STATE " << i << "\n";
    out << render_state_text(s.observation) << "\n";
    out << "Actions:  [";
    for (std::size_t a = 0; a < s.actions.size(); ++a) {
      if (a > 0) out << ", ";
      out << '\'' << s.actions[a].command_text << '\'';
    }
    out << "]\n";
    out << "Qvalues:  [";
    for (std::size_t a = 0; a < s.q_values.size(); ++a) {
      if (a > 0) out << ", ";
      out << format_q(s.q_values[a]);
    }
    out << "]\n";
    out << "  Action:  " << s.chosen.command_text << "\n";
    out << "Reward:  " << s.reward << ", Score " << s.score << ", Done "
        << (s.done ? "True" : "False") << "\n";
  }
  return out.str();
}

}  // namespace textrl::env
