#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "emfa/sim/scene.hpp"

namespace emfa::sim {

/// Scene config document. Every field except "emitters" is optional and
/// falls back to default_scene(); "plan" embeds a band plan, "plan_file"
/// references one relative to the scene file. Throws ConfigError naming the
/// offending field, including scene invariant violations.
Scene scene_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json scene_to_json(const Scene& scene);
Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& path);
std::string serialize_scene(const Scene& scene);

}  // namespace emfa::sim
