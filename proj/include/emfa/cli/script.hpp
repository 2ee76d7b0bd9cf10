#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emfa/core/series.hpp"
#include "emfa/engine/operator.hpp"
#include "emfa/sim/scene.hpp"

namespace emfa::cli {

enum class ActionKind { Antenna, Traffic, Confirm, Decline };

/// One scripted step. Timed actions (at_s) run when the simulated clock
/// reaches them; prompt actions run, in file order, when that prompt appears.
struct ScriptAction {
    std::optional<double> at_s;
    std::optional<engine::Step> on_prompt;
    ActionKind kind = ActionKind::Confirm;
    sim::EmitterRole antenna = sim::EmitterRole::Rbs;
    bool traffic_on = false;
    TrafficDirection traffic_direction = TrafficDirection::Uplink;
    double traffic_rate_mbps = 0.0;
};

struct ScriptExpectations {
    std::optional<std::vector<std::string>> selected_bands;
    std::optional<std::size_t> phase1_series;
    std::optional<std::size_t> phase2_series;
    std::optional<std::size_t> phase3_series;
};

struct ScenarioScript {
    std::optional<std::filesystem::path> scene_file;  // resolved against the script directory
    std::string location_label = "scripted";
    bool los = true;
    double distance_to_rbs_m = 0.0;
    std::optional<TrafficDirection> direction;
    std::optional<double> rate_mbps;  // empty with rate_max = MAX
    bool rate_max = false;
    std::vector<ScriptAction> actions;
    ScriptExpectations expect;
};

/// Throws ConfigError naming the offending field; timed actions must be in
/// non-decreasing time order.
ScenarioScript script_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ScenarioScript load_script(const std::filesystem::path& path);

/// Human-readable mismatches between a session and the expectations.
std::vector<std::string> check_expectations(const ScriptExpectations& expect, const Session& session);

}  // namespace emfa::cli
