#include "textrl/env/dsl.hpp"

#include <fstream>
#include <sstream>

#include "textrl/errors.hpp"

namespace textrl::env {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

int parse_int(const std::string& s, int line, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected integer for " + what + ", got '" + s + "'");
  }
}

bool parse_bool(const std::string& s, int line, const std::string& what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError(line, "expected true|false for " + what + ", got '" + s + "'");
}

int count_blanks(const std::string& surface, int line) {
  auto occurrences = [&](const std::string& marker) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = surface.find(marker, pos)) != std::string::npos) {
      ++n;
      pos += marker.size();
    }
    return n;
  };
  int n1 = occurrences("OBJ1");
  int n2 = occurrences("OBJ2");
  if (n1 > 1 || n2 > 1)
    throw ParseError(line, "duplicate blank marker in template '" + surface + "'");
  if (n2 == 1 && n1 == 0)
    throw ParseError(line, "template '" + surface + "' uses OBJ2 without OBJ1");
  return n1 + n2;
}

struct Parser {
  GameSpec game;
  enum class Section { kNone, kRoom, kObject, kReward, kMeta };
  Section section = Section::kNone;
  std::string current_room;
  std::string current_object;

  void handle_header(const std::string& body, int line) {
    auto words = split_ws(body);
    if (words.empty()) throw ParseError(line, "empty section header");
    const std::string& kind = words[0];
    if (kind == "room") {
      if (words.size() != 2) throw ParseError(line, "[room] needs exactly one id");
      if (game.rooms.count(words[1]))
        throw ParseError(line, "duplicate room id '" + words[1] + "'");
      current_room = words[1];
      game.rooms[current_room] = RoomSpec{};
      section = Section::kRoom;
    } else if (kind == "object") {
      if (words.size() != 2) throw ParseError(line, "[object] needs exactly one id");
      if (game.objects.count(words[1]))
        throw ParseError(line, "duplicate object id '" + words[1] + "'");
      current_object = words[1];
      game.objects[current_object] = ObjectSpec{};
      section = Section::kObject;
    } else if (kind == "reward") {
      if (words.size() != 1) throw ParseError(line, "[reward] takes no arguments");
      game.reward_events.push_back(RewardEvent{});
      section = Section::kReward;
    } else if (kind == "meta") {
      if (words.size() != 1) throw ParseError(line, "[meta] takes no arguments");
      section = Section::kMeta;
    } else {
      throw ParseError(line, "unknown section '" + kind + "'");
    }
  }

  void handle_template(const std::string& rest, int line) {
    std::string surface = trim(rest);
    if (surface.empty()) throw ParseError(line, "empty template surface");
    ActionTemplate t;
    t.template_id = static_cast<int>(game.templates.size());
    t.surface = surface;
    t.blank_count = count_blanks(surface, line);
    game.templates.push_back(std::move(t));
    section = Section::kNone;
  }

  void handle_fillers(const std::string& rest, int line) {
    auto words = split_ws(rest);
    if (words.empty()) throw ParseError(line, "empty filler list");
    for (auto& w : words) game.filler_vocab.push_back(w);
    section = Section::kNone;
  }

  void handle_kv(const std::string& key, const std::string& value, int line) {
    switch (section) {
      case Section::kRoom: {
        RoomSpec& room = game.rooms[current_room];
        if (key == "name") {
          room.name = value;
        } else if (key == "desc") {
          room.description = value;
        } else if (key == "exit") {
          auto words = split_ws(value);
          if (words.size() != 2)
            throw ParseError(line, "exit needs '<direction> <room-id>'");
          if (room.exits.count(words[0]))
            throw ParseError(line, "duplicate exit '" + words[0] + "'");
          room.exits[words[0]] = words[1];
        } else {
          throw ParseError(line, "unknown room key '" + key + "'");
        }
        break;
      }
      case Section::kObject: {
        ObjectSpec& obj = game.objects[current_object];
        if (key == "name") {
          obj.name = value;
        } else if (key == "loc") {
          obj.initial_location = value;
        } else if (key == "portable") {
          obj.portable = parse_bool(value, line, "portable");
        } else {
          throw ParseError(line, "unknown object key '" + key + "'");
        }
        break;
      }
      case Section::kReward: {
        RewardEvent& ev = game.reward_events.back();
        if (key == "trigger") {
          auto words = split_ws(value);
          if (words.empty()) throw ParseError(line, "empty trigger");
          if (words[0] == "take" && words.size() == 2) {
            ev.kind = TriggerKind::kTake;
            ev.object_id = words[1];
          } else if (words[0] == "enter" && words.size() == 2) {
            ev.kind = TriggerKind::kEnter;
            ev.room_id = words[1];
          } else if (words[0] == "apply" && words.size() == 4) {
            ev.kind = TriggerKind::kApply;
            ev.template_index = parse_int(words[1], line, "template index");
            ev.object_id = words[2];
            ev.object2_id = words[3];
          } else {
            throw ParseError(line, "bad trigger '" + value + "'");
          }
        } else if (key == "points") {
          ev.points = parse_int(value, line, "points");
        } else if (key == "once") {
          ev.once = parse_bool(value, line, "once");
        } else if (key == "terminal") {
          ev.terminal = parse_bool(value, line, "terminal");
        } else {
          throw ParseError(line, "unknown reward key '" + key + "'");
        }
        break;
      }
      case Section::kMeta: {
        if (key == "start") {
          game.start_room = value;
        } else if (key == "cap") {
          game.episode_cap = parse_int(value, line, "cap");
        } else if (key == "id") {
          game.game_id = value;
        } else {
          throw ParseError(line, "unknown meta key '" + key + "'");
        }
        break;
      }
      case Section::kNone:
        throw ParseError(line, "key '" + key + "' outside any section");
    }
  }
};

void validate(const GameSpec& game) {
  if (game.rooms.empty()) throw ValidationError("game has no rooms");
  if (game.templates.empty()) throw ValidationError("game has no templates");
  if (game.filler_vocab.empty()) throw ValidationError("game has no fillers");
  if (game.episode_cap < 1) throw ValidationError("episode cap must be >= 1");
  if (!game.rooms.count(game.start_room))
    throw ValidationError("start room '" + game.start_room + "' does not exist");
  for (const auto& [id, room] : game.rooms) {
    for (const auto& [dir, target] : room.exits) {
      if (!game.rooms.count(target))
        throw ValidationError("room '" + id + "' exit '" + dir +
                              "' targets unknown room '" + target + "'");
    }
  }
  for (const auto& [id, obj] : game.objects) {
    const std::string& loc = obj.initial_location;
    if (loc != kInventory && loc != kNowhere && !game.rooms.count(loc))
      throw ValidationError("object '" + id + "' starts in unknown location '" +
                            loc + "'");
  }
  for (std::size_t i = 0; i < game.reward_events.size(); ++i) {
    const RewardEvent& ev = game.reward_events[i];
    std::string where = "reward event " + std::to_string(i);
    switch (ev.kind) {
      case TriggerKind::kTake:
        if (!game.objects.count(ev.object_id))
          throw ValidationError(where + " takes unknown object '" + ev.object_id + "'");
        break;
      case TriggerKind::kEnter:
        if (!game.rooms.count(ev.room_id))
          throw ValidationError(where + " enters unknown room '" + ev.room_id + "'");
        break;
      case TriggerKind::kApply:
        if (ev.template_index < 0 ||
            ev.template_index >= static_cast<int>(game.templates.size()))
          throw ValidationError(where + " applies unknown template index " +
                                std::to_string(ev.template_index));
        if (!game.objects.count(ev.object_id))
          throw ValidationError(where + " applies unknown object '" + ev.object_id + "'");
        if (!game.objects.count(ev.object2_id))
          throw ValidationError(where + " applies unknown object '" + ev.object2_id + "'");
        break;
    }
  }
}

}  // namespace

GameSpec load_game(std::string_view spec_text) {
  Parser parser;
  int line_no = 0;
  std::size_t begin = 0;
  while (begin <= spec_text.size()) {
    std::size_t end = spec_text.find('\n', begin);
    std::string_view raw = (end == std::string_view::npos)
                               ? spec_text.substr(begin)
                               : spec_text.substr(begin, end - begin);
    begin = (end == std::string_view::npos) ? spec_text.size() + 1 : end + 1;
    ++line_no;

    std::string stripped = trim(raw);
    if (stripped.empty() || stripped[0] == '#') continue;

    if (stripped[0] == '[') {
      std::size_t close = stripped.find(']');
      if (close == std::string::npos)
        throw ParseError(line_no, "unterminated section header");
      std::string head = trim(stripped.substr(1, close - 1));
      std::string rest = stripped.substr(close + 1);
      if (head == "template") {
        parser.handle_template(rest, line_no);
      } else if (head == "fillers") {
        parser.handle_fillers(rest, line_no);
      } else {
        if (!trim(rest).empty())
          throw ParseError(line_no, "unexpected text after [" + head + "]");
        parser.handle_header(head, line_no);
      }
      continue;
    }

    std::size_t colon = stripped.find(':');
    if (colon == std::string::npos)
      throw ParseError(line_no, "expected 'key: value'");
    std::string key = trim(stripped.substr(0, colon));
    std::string value = trim(stripped.substr(colon + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    parser.handle_kv(key, value, line_no);
  }

  validate(parser.game);
  return parser.game;
}

GameSpec load_game_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open game file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  GameSpec game = load_game(buf.str());
  if (game.game_id.empty()) {
    // Default id from the filename stem.
    std::size_t slash = path.find_last_of("/\\");
    std::string stem = (slash == std::string::npos) ? path : path.substr(slash + 1);
    std::size_t dot = stem.find_last_of('.');
    game.game_id = (dot == std::string::npos) ? stem : stem.substr(0, dot);
  }
  return game;
}

}  // namespace textrl::env
