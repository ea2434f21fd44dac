#pragma once

#include "music/som.hpp"

#include <json.hpp>

#include <string>

namespace music {

/// JSON form of a PrototypeSet. Weights are stored as a flat row-major array
/// of numbers; the serializer emits shortest round-trip decimal forms, so a
/// save/load cycle reproduces every double bit for bit. Non-finite weights
/// are rejected.
void to_json(nlohmann::json& j, const PrototypeSet& som);
void from_json(const nlohmann::json& j, PrototypeSet& som);

void save_prototype_set(const std::string& path, const PrototypeSet& som);
PrototypeSet load_prototype_set(const std::string& path);

} // namespace music
