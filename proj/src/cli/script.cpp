#include "emfa/cli/script.hpp"

#include "emfa/core/io.hpp"

namespace emfa::cli {

namespace {

namespace jf = json_field;

std::optional<engine::Step> parse_step(std::string_view s) {
    if (s == "M1") return engine::Step::M1;
    if (s == "M2") return engine::Step::M2;
    if (s == "M3") return engine::Step::M3;
    return std::nullopt;
}

ScriptAction action_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    ScriptAction a;
    if (j.contains("at_s")) {
        a.at_s = jf::number(j, "at_s", path);
        if (*a.at_s < 0.0) throw ConfigError(jf::join(path, "at_s"), "must be non-negative");
    }
    if (j.contains("on_prompt")) {
        a.on_prompt = parse_step(jf::string(j, "on_prompt", path));
        if (!a.on_prompt) throw ConfigError(jf::join(path, "on_prompt"), "expected M1, M2 or M3");
    }
    if (a.at_s.has_value() == a.on_prompt.has_value())
        throw ConfigError(path, "exactly one of at_s and on_prompt is required");

    const std::string kind = jf::string(j, "action", path);
    if (kind == "antenna") {
        a.kind = ActionKind::Antenna;
        auto role = sim::parse_role(jf::string(j, "target", path));
        if (!role) throw ConfigError(jf::join(path, "target"), "expected RBS or UE");
        a.antenna = *role;
    } else if (kind == "traffic") {
        a.kind = ActionKind::Traffic;
        a.traffic_on = jf::boolean(j, "active", path);
        if (a.traffic_on) {
            auto d = parse_direction(jf::string(j, "direction", path));
            if (!d) throw ConfigError(jf::join(path, "direction"), "expected UL or DL");
            a.traffic_direction = *d;
            a.traffic_rate_mbps = jf::number(j, "rate_mbps", path);
            if (!(a.traffic_rate_mbps >= 0.0)) throw ConfigError(jf::join(path, "rate_mbps"), "must be non-negative");
        }
    } else if (kind == "confirm" || kind == "decline") {
        a.kind = kind == "confirm" ? ActionKind::Confirm : ActionKind::Decline;
        if (!a.on_prompt) throw ConfigError(jf::join(path, "action"), "operator answers need on_prompt");
    } else {
        throw ConfigError(jf::join(path, "action"), "unknown action '" + kind + "'");
    }
    return a;
}

}  // namespace

ScenarioScript script_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("", "scenario script must be an object");
    ScenarioScript s;
    if (doc.contains("scene")) s.scene_file = base_dir / jf::string(doc, "scene", "");
    if (doc.contains("location")) s.location_label = jf::string(doc, "location", "");
    if (doc.contains("los")) s.los = jf::boolean(doc, "los", "");
    if (doc.contains("distance_to_rbs_m")) s.distance_to_rbs_m = jf::number(doc, "distance_to_rbs_m", "");
    if (doc.contains("direction")) {
        s.direction = parse_direction(jf::string(doc, "direction", ""));
        if (!s.direction) throw ConfigError("direction", "expected UL or DL");
    }
    if (doc.contains("rate")) {
        const auto& r = doc["rate"];
        if (r.is_string() && r.get<std::string>() == "MAX") {
            s.rate_max = true;
        } else if (r.is_number() && r.get<double>() > 0.0) {
            s.rate_mbps = r.get<double>();
        } else {
            throw ConfigError("rate", "expected \"MAX\" or a positive number of Mbps");
        }
    }
    const auto& actions = jf::require(doc, "actions", "");
    if (!actions.is_array()) throw ConfigError("actions", "expected an array");
    std::optional<double> last_time;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::string path = jf::index("actions", i);
        ScriptAction a = action_from_json(actions[i], path);
        if (a.at_s) {
            if (last_time && *a.at_s < *last_time) throw ConfigError(jf::join(path, "at_s"), "actions out of time order");
            last_time = a.at_s;
        }
        s.actions.push_back(a);
    }
    if (doc.contains("expect")) {
        const auto& e = doc["expect"];
        if (!e.is_object()) throw ConfigError("expect", "expected an object");
        if (e.contains("selected_bands")) {
            std::vector<std::string> bands;
            const auto& arr = e["selected_bands"];
            if (!arr.is_array()) throw ConfigError("expect.selected_bands", "expected an array");
            for (const auto& b : arr) {
                if (!b.is_string()) throw ConfigError("expect.selected_bands", "expected band ids");
                bands.push_back(b.get<std::string>());
            }
            s.expect.selected_bands = bands;
        }
        auto count = [&](const char* key, std::optional<std::size_t>& out) {
            if (!e.contains(key)) return;
            const auto v = jf::integer(e, key, "expect");
            if (v < 0) throw ConfigError(jf::join("expect", key), "must be non-negative");
            out = static_cast<std::size_t>(v);
        };
        count("phase1_series", s.expect.phase1_series);
        count("phase2_series", s.expect.phase2_series);
        count("phase3_series", s.expect.phase3_series);
    }
    return s;
}

ScenarioScript load_script(const std::filesystem::path& path) {
    return script_from_json(read_json_file(path), path.parent_path());
}

std::vector<std::string> check_expectations(const ScriptExpectations& expect, const Session& session) {
    std::vector<std::string> out;
    if (expect.selected_bands && *expect.selected_bands != session.selected_bands) {
        std::string got;
        for (const auto& b : session.selected_bands) got += (got.empty() ? "" : ",") + b;
        out.push_back("selected bands differ: got [" + got + "]");
    }
    auto count = [&](const std::optional<std::size_t>& want, std::size_t got, const char* what) {
        if (want && *want != got)
            out.push_back(std::string(what) + ": expected " + std::to_string(*want) + ", got " + std::to_string(got));
    };
    count(expect.phase1_series, session.phase1.size(), "phase1 series");
    count(expect.phase2_series, session.phase2.size(), "phase2 series");
    count(expect.phase3_series, session.phase3.size(), "phase3 series");
    return out;
}

}  // namespace emfa::cli
