#include "textrl/env/engine.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "textrl/errors.hpp"

namespace textrl::env {

namespace {

std::string room_headline(const GameSpec& game, const std::string& room_id) {
  const RoomSpec& room = game.rooms.at(room_id);
  return room.name + ". " + room.description;
}

std::string inventory_text(const GameSpec& game, const WorldState& state) {
  std::vector<std::string> carried;
  for (const auto& [id, loc] : state.object_locations) {
    if (loc == kInventory) carried.push_back(game.objects.at(id).name);
  }
  if (carried.empty()) return "you are empty handed.";
  std::string out = "you carry:";
  for (const auto& name : carried) out += " " + name;
  out += ".";
  return out;
}

std::string look_text(const GameSpec& game, const WorldState& state) {
  const RoomSpec& room = game.rooms.at(state.player_room);
  std::string out = room_headline(game, state.player_room);
  if (!room.exits.empty()) {
    out += " exits:";
    for (const auto& [dir, target] : room.exits) out += " " + dir;
    out += ".";
  }
  std::vector<std::string> here;
  for (const auto& [id, loc] : state.object_locations) {
    if (loc == state.player_room) here.push_back(game.objects.at(id).name);
  }
  if (here.empty()) {
    out += " you see nothing special.";
  } else {
    out += " you see:";
    for (const auto& name : here) out += " " + name;
    out += ".";
  }
  return out;
}

Observation observe(const GameSpec& game, const WorldState& state,
                    std::string event_text) {
  return Observation{std::move(event_text), inventory_text(game, state),
                     look_text(game, state)};
}

std::string substitute(const std::string& surface, const std::string& w1,
                       const std::string& w2) {
  std::string out = surface;
  auto replace_one = [&out](const std::string& marker, const std::string& word) {
    std::size_t pos = out.find(marker);
    if (pos != std::string::npos) out.replace(pos, marker.size(), word);
  };
  replace_one("OBJ1", w1);
  replace_one("OBJ2", w2);
  return out;
}

const std::string* filler_word(const GameSpec& game, std::optional<int> idx) {
  if (!idx) return nullptr;
  return &game.filler_vocab.at(static_cast<std::size_t>(*idx));
}

struct EventOutcome {
  int reward = 0;
  bool terminal = false;
};

void fire_one(const GameSpec& game, WorldState& state, int idx, EventOutcome& out) {
  const RewardEvent& ev = game.reward_events[static_cast<std::size_t>(idx)];
  if (ev.once && state.fired_events.count(idx)) return;
  if (ev.once) state.fired_events.insert(idx);
  state.cumulative_score += ev.points;
  out.reward += ev.points;
  if (ev.terminal) out.terminal = true;
}

// Fires take/enter reward events matching what the action just did.
EventOutcome fire_events(const GameSpec& game, WorldState& state,
                         const std::string* took, const std::string* entered) {
  EventOutcome out;
  for (std::size_t i = 0; i < game.reward_events.size(); ++i) {
    const RewardEvent& ev = game.reward_events[i];
    bool triggered = false;
    switch (ev.kind) {
      case TriggerKind::kTake:
        triggered = took != nullptr && *took == ev.object_id;
        break;
      case TriggerKind::kEnter:
        triggered = entered != nullptr && *entered == ev.room_id;
        break;
      case TriggerKind::kApply:
        break;
    }
    if (triggered) fire_one(game, state, static_cast<int>(i), out);
  }
  return out;
}

bool object_accessible(const WorldState& state, const std::string& object_id) {
  auto it = state.object_locations.find(object_id);
  if (it == state.object_locations.end()) return false;
  return it->second == kInventory || it->second == state.player_room;
}

// Apply events matching this exact (template, fillers) whose objects are
// accessible and which are still eligible to fire. An apply-style command
// succeeds only when at least one such event exists.
std::vector<int> eligible_apply_events(const GameSpec& game, const WorldState& state,
                                       const Action& action) {
  std::vector<int> out;
  const std::string* w1 = filler_word(game, action.filler1);
  const std::string* w2 = filler_word(game, action.filler2);
  for (std::size_t i = 0; i < game.reward_events.size(); ++i) {
    const RewardEvent& ev = game.reward_events[i];
    if (ev.kind != TriggerKind::kApply) continue;
    if (ev.template_index != action.template_id) continue;
    if (w1 == nullptr || *w1 != ev.object_id) continue;
    if (w2 != nullptr && *w2 != ev.object2_id) continue;
    if (w2 == nullptr && !ev.object2_id.empty()) continue;
    if (ev.once && state.fired_events.count(static_cast<int>(i))) continue;
    if (!object_accessible(state, ev.object_id)) continue;
    if (!ev.object2_id.empty() && !object_accessible(state, ev.object2_id)) continue;
    out.push_back(static_cast<int>(i));
  }
  return out;
}

std::string first_word(const std::string& surface) {
  std::size_t sp = surface.find(' ');
  return sp == std::string::npos ? surface : surface.substr(0, sp);
}

}  // namespace

std::pair<WorldState, Observation> reset(const GameSpec& game) {
  WorldState state;
  state.player_room = game.start_room;
  for (const auto& [id, obj] : game.objects) {
    state.object_locations[id] = obj.initial_location;
  }
  Observation obs = observe(game, state, room_headline(game, game.start_room));
  return {std::move(state), std::move(obs)};
}

StepResult step(const GameSpec& game, const WorldState& state, const Action& action) {
  if (state.done) throw SteppedAfterDone();
  if (action.template_id < 0 ||
      action.template_id >= static_cast<int>(game.templates.size()))
    throw IndexOutOfRange("template id " + std::to_string(action.template_id));

  StepResult result;
  result.state = state;
  WorldState& s = result.state;
  s.steps_taken += 1;

  const ActionTemplate& tmpl = game.templates[static_cast<std::size_t>(action.template_id)];
  const std::string verb = first_word(tmpl.surface);
  const std::string* w1 = filler_word(game, action.filler1);

  std::string event_text = "nothing happens";
  EventOutcome fired;

  if (verb == "go" && tmpl.blank_count >= 1 && w1 != nullptr) {
    const RoomSpec& room = game.rooms.at(s.player_room);
    auto exit = room.exits.find(*w1);
    if (exit != room.exits.end()) {
      s.player_room = exit->second;
      event_text = room_headline(game, s.player_room);
      fired = fire_events(game, s, nullptr, &s.player_room);
    }
  } else if (verb == "take" && tmpl.blank_count >= 1 && w1 != nullptr) {
    auto obj = game.objects.find(*w1);
    auto loc = s.object_locations.find(*w1);
    if (obj != game.objects.end() && obj->second.portable &&
        loc != s.object_locations.end() && loc->second == s.player_room) {
      loc->second = kInventory;
      event_text = "taken.";
      fired = fire_events(game, s, w1, nullptr);
    }
  } else if (verb == "drop" && tmpl.blank_count >= 1 && w1 != nullptr) {
    auto loc = s.object_locations.find(*w1);
    if (loc != s.object_locations.end() && loc->second == kInventory) {
      loc->second = s.player_room;
      event_text = "dropped.";
    }
  } else {
    std::vector<int> eligible = eligible_apply_events(game, s, action);
    if (!eligible.empty()) {
      event_text = "you " + action.command_text + ".";
      for (int idx : eligible) fire_one(game, s, idx, fired);
    }
  }

  result.reward = fired.reward;
  if (fired.terminal) s.done = true;
  if (s.steps_taken >= game.episode_cap) s.done = true;
  result.done = s.done;
  result.observation = observe(game, s, std::move(event_text));
  return result;
}

std::vector<Action> enumerate_candidate_actions(const GameSpec& game) {
  std::vector<Action> out;
  const int fillers = static_cast<int>(game.filler_vocab.size());
  for (const ActionTemplate& tmpl : game.templates) {
    if (tmpl.blank_count == 0) {
      out.push_back(Action{tmpl.template_id, std::nullopt, std::nullopt, tmpl.surface});
    } else if (tmpl.blank_count == 1) {
      for (int f1 = 0; f1 < fillers; ++f1) {
        out.push_back(Action{tmpl.template_id, f1, std::nullopt,
                             substitute(tmpl.surface, game.filler_vocab[static_cast<std::size_t>(f1)], "")});
      }
    } else {
      for (int f1 = 0; f1 < fillers; ++f1) {
        for (int f2 = 0; f2 < fillers; ++f2) {
          out.push_back(Action{tmpl.template_id, f1, f2,
                               substitute(tmpl.surface,
                                          game.filler_vocab[static_cast<std::size_t>(f1)],
                                          game.filler_vocab[static_cast<std::size_t>(f2)])});
        }
      }
    }
  }
  return out;
}

std::vector<Action> valid_actions(const GameSpec& game, const WorldState& state) {
  if (state.done) throw SteppedAfterDone();
  std::vector<Action> out;
  const std::uint64_t before = state_hash(state);
  for (const Action& action : enumerate_candidate_actions(game)) {
    StepResult probe = step(game, state, action);
    if (probe.reward != 0 || state_hash(probe.state) != before) out.push_back(action);
  }
  return out;
}

std::string render_state_text(const Observation& obs) {
  return obs.event_text + " | " + obs.inventory_text + " | " + obs.look_text;
}

std::uint64_t state_hash(const WorldState& state) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix_bytes = [&h](const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 0x100000001B3ull;
    }
  };
  auto mix = [&](const std::string& s) {
    mix_bytes(s.data(), s.size());
    mix_bytes("\x1f", 1);
  };
  mix(state.player_room);
  for (const auto& [id, loc] : state.object_locations) {
    mix(id);
    mix(loc);
  }
  for (int idx : state.fired_events) {
    std::uint64_t v = static_cast<std::uint64_t>(idx);
    mix_bytes(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  return h;
}

std::optional<Action> parse_command(const GameSpec& game, const std::string& text) {
  std::string normalized;
  {
    std::istringstream in(text);
    std::string w;
    while (in >> w) {
      std::transform(w.begin(), w.end(), w.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (!normalized.empty()) normalized += ' ';
      normalized += w;
    }
  }
  for (const Action& action : enumerate_candidate_actions(game)) {
    std::string lowered = action.command_text;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == normalized) return action;
  }
  return std::nullopt;
}

std::vector<std::string> game_lexicon(const GameSpec& game) {
  std::vector<std::string> out;
  for (const auto& [id, room] : game.rooms) {
    out.push_back(room.name);
    out.push_back(room.description);
    for (const auto& [dir, target] : room.exits) out.push_back(dir);
  }
  for (const auto& [id, obj] : game.objects) {
    out.push_back(id);
    out.push_back(obj.name);
  }
  for (const ActionTemplate& tmpl : game.templates) {
    out.push_back(substitute(tmpl.surface, "", ""));
  }
  for (const auto& word : game.filler_vocab) out.push_back(word);
  out.push_back("nothing happens");
  out.push_back("taken.");
  out.push_back("dropped.");
  out.push_back("you");
  out.push_back("you are empty handed.");
  out.push_back("you carry:");
  out.push_back("you see nothing special.");
  out.push_back("you see:");
  out.push_back("exits:");
  out.push_back("|");
  return out;
}

}  // namespace textrl::env
