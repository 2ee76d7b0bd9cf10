#include "emfa/sim/scene_io.hpp"

#include "emfa/core/io.hpp"

namespace emfa::sim {

using nlohmann::json;
namespace jf = json_field;

namespace {

template <class T>
void optional_number(const json& doc, std::string_view key, T& out) {
    if (doc.contains(key)) out = static_cast<T>(jf::number(doc, key, ""));
}

}  // namespace

Scene scene_from_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("", "scene must be an object");
    Scene s = default_scene();
    if (doc.contains("plan")) {
        try {
            s.plan = band_plan_from_json(doc["plan"]);
        } catch (const ConfigError& e) {
            throw ConfigError("plan." + e.where(), e.what());
        }
    } else if (doc.contains("plan_file")) {
        s.plan = load_band_plan(base_dir / jf::string(doc, "plan_file", ""));
    }

    const json& emitters = jf::require(doc, "emitters", "");
    if (!emitters.is_array()) throw ConfigError("emitters", "expected a list");
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        const std::string p = jf::index("emitters", i);
        const json& je = emitters[i];
        Emitter e;
        e.band_id = jf::string(je, "band_id", p);
        auto role = parse_role(jf::string(je, "role", p));
        if (!role) throw ConfigError(jf::join(p, "role"), "expected RBS or UE");
        e.role = *role;
        e.base_density = PowerDensityLog{jf::number(je, "base_density_dbm_m2", p)};
        e.traffic_coupling = je.contains("traffic_coupling") ? jf::number(je, "traffic_coupling", p)
                                                             : (e.role == EmitterRole::Ue ? 1.0 : 0.0);
        if (je.contains("psd_shape") && jf::string(je, "psd_shape", p) != "FLAT")
            throw ConfigError(jf::join(p, "psd_shape"), "only FLAT is supported");
        s.emitters.push_back(std::move(e));
    }

    if (doc.contains("antenna_target")) {
        auto role = parse_role(jf::string(doc, "antenna_target", ""));
        if (!role) throw ConfigError("antenna_target", "expected RBS or UE");
        s.antenna_target = *role;
    }
    optional_number(doc, "front_to_back_db", s.front_to_back_db);
    optional_number(doc, "preamp_gain_db", s.preamp_gain_db);
    if (doc.contains("adc_max_dbm_m2")) s.adc_max = PowerDensityLog{jf::number(doc, "adc_max_dbm_m2", "")};
    optional_number(doc, "noise_sigma_db", s.noise_sigma_db);
    optional_number(doc, "preamp_noise_factor", s.preamp_noise_factor);
    optional_number(doc, "ack_fraction", s.ack_fraction);
    if (doc.contains("link")) {
        const json& link = doc["link"];
        s.link.ul_mbps = jf::number(link, "ul_mbps", "link");
        s.link.dl_mbps = jf::number(link, "dl_mbps", "link");
    }
    if (doc.contains("max_ref_level_dbm_m2"))
        s.max_ref_level = PowerDensityLog{jf::number(doc, "max_ref_level_dbm_m2", "")};
    if (doc.contains("sweep_points")) s.default_sweep_points = static_cast<int>(jf::integer(doc, "sweep_points", ""));
    if (doc.contains("rng_seed")) {
        const auto seed = jf::integer(doc, "rng_seed", "");
        if (seed < 0) throw ConfigError("rng_seed", "must be non-negative");
        s.rng_seed = static_cast<std::uint64_t>(seed);
    }
    if (doc.contains("traffic_active")) s.traffic_active = jf::boolean(doc, "traffic_active", "");
    if (doc.contains("traffic_direction")) {
        auto d = parse_direction(jf::string(doc, "traffic_direction", ""));
        if (!d) throw ConfigError("traffic_direction", "expected UL or DL");
        s.traffic_direction = *d;
    }
    optional_number(doc, "traffic_rate_mbps", s.traffic_rate_mbps);

    if (auto bad = s.violations(); !bad.empty()) {
        const auto& first = bad.front();
        const auto colon = first.find(": ");
        throw ConfigError(first.substr(0, colon), first.substr(colon + 2));
    }
    return s;
}

json scene_to_json(const Scene& s) {
    json emitters = json::array();
    for (const auto& e : s.emitters) {
        emitters.push_back({{"band_id", e.band_id},
                            {"role", to_string(e.role)},
                            {"base_density_dbm_m2", e.base_density.dbm_per_m2()},
                            {"traffic_coupling", e.traffic_coupling},
                            {"psd_shape", "FLAT"}});
    }
    return json{
        {"plan", band_plan_to_json(s.plan)},
        {"emitters", emitters},
        {"antenna_target", to_string(s.antenna_target)},
        {"front_to_back_db", s.front_to_back_db},
        {"preamp_gain_db", s.preamp_gain_db},
        {"adc_max_dbm_m2", s.adc_max.dbm_per_m2()},
        {"noise_sigma_db", s.noise_sigma_db},
        {"preamp_noise_factor", s.preamp_noise_factor},
        {"ack_fraction", s.ack_fraction},
        {"link", {{"ul_mbps", s.link.ul_mbps}, {"dl_mbps", s.link.dl_mbps}}},
        {"max_ref_level_dbm_m2", s.max_ref_level.dbm_per_m2()},
        {"sweep_points", s.default_sweep_points},
        {"rng_seed", s.rng_seed},
        {"traffic_active", s.traffic_active},
        {"traffic_direction", to_string(s.traffic_direction)},
        {"traffic_rate_mbps", s.traffic_rate_mbps},
    };
}

Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir) {
    return scene_from_json(parse_json_text(text), base_dir);
}

Scene load_scene(const std::filesystem::path& path) {
    return scene_from_json(read_json_file(path), path.parent_path());
}

std::string serialize_scene(const Scene& scene) { return scene_to_json(scene).dump(2) + "\n"; }

}  // namespace emfa::sim
