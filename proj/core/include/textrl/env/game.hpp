#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace textrl::env {

// Special object locations beside room ids.
inline constexpr const char* kInventory = "inventory";
inline constexpr const char* kNowhere = "nowhere";

struct RoomSpec {
  std::string name;
  std::string description;
  std::map<std::string, std::string> exits;  // direction word -> room id
};

struct ObjectSpec {
  std::string name;
  std::string initial_location;  // room id, kInventory or kNowhere
  bool portable = false;
};

// Command pattern with up to two blanks. blank_count is derived from the
// OBJ1/OBJ2 markers in the surface.
struct ActionTemplate {
  int template_id = 0;
  std::string surface;
  int blank_count = 0;
};

enum class TriggerKind { kTake, kEnter, kApply };

struct RewardEvent {
  TriggerKind kind = TriggerKind::kTake;
  std::string object_id;   // kTake / kApply first blank
  std::string object2_id;  // kApply second blank
  std::string room_id;     // kEnter
  int template_index = -1; // kApply
  int points = 0;
  bool once = false;
  bool terminal = false;
};

struct GameSpec {
  std::string game_id;
  std::map<std::string, RoomSpec> rooms;
  std::map<std::string, ObjectSpec> objects;
  std::vector<ActionTemplate> templates;
  std::vector<std::string> filler_vocab;
  std::vector<RewardEvent> reward_events;
  std::string start_room;
  int episode_cap = 100;

  // Best achievable total: positive points of once events, counted once each.
  // Repeatable positive events would make the bound unbounded; bundled games
  // only use once events for positive points.
  int max_score() const {
    int total = 0;
    for (const auto& ev : reward_events) {
      if (ev.once && ev.points > 0) total += ev.points;
    }
    return total;
  }
};

struct Action {
  int template_id = 0;
  std::optional<int> filler1;
  std::optional<int> filler2;
  std::string command_text;
};

struct WorldState {
  std::string player_room;
  std::map<std::string, std::string> object_locations;
  std::set<int> fired_events;  // indices of once events that already fired
  int cumulative_score = 0;
  int steps_taken = 0;
  bool done = false;
};

struct Observation {
  std::string event_text;
  std::string inventory_text;
  std::string look_text;
};

}  // namespace textrl::env
