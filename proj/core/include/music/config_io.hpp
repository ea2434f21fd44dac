#pragma once

#include "music/music.hpp"

#include <json.hpp>

#include <string>

namespace music {

/// JSON form of MusicConfig. Serialization writes every field; parsing
/// starts from the defaults and overrides only the keys present, so partial
/// config files compose with flag overrides.
void to_json(nlohmann::json& j, const MusicConfig& cfg);
void from_json(const nlohmann::json& j, MusicConfig& cfg);

MusicConfig load_music_config(const std::string& path);

} // namespace music
