#pragma once

#include <string>
#include <string_view>

#include "textrl/env/game.hpp"

namespace textrl::env {

// Parses and validates the line-oriented game definition language.
// Throws ParseError for malformed text and ValidationError for dangling
// references (exits to unknown rooms, rewards naming unknown objects, ...).
GameSpec load_game(std::string_view spec_text);

// Convenience wrapper reading the file at `path`.
GameSpec load_game_file(const std::string& path);

}  // namespace textrl::env
