#include "emfa/engine/params.hpp"

#include <cmath>
#include <set>

#include "emfa/core/io.hpp"

namespace emfa::engine {

std::optional<std::string> EngineParams::invalid_field() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(safety_margin_db)) return "safety_margin_db";
    if (!positive(max_time_search_s)) return "max_time_search_s";
    if (y_ticks < 1) return "y_ticks";
    if (adjust_iterations < 1) return "adjust_iterations";
    if (!std::isfinite(preamp_threshold.dbm_per_m2())) return "preamp_threshold_dbm_m2";
    if (n_samples < 1) return "n_samples";
    if (!positive(int_sample_time_s)) return "int_sample_time_s";
    if (!positive(thre_inc_percent)) return "thre_inc_percent";
    if (!wide_span_start.valid() || !(wide_span_start < wide_span_stop)) return "wide_span";
    if (!positive(ref_level_active.volts_per_meter())) return "ref_level_active_vpm";
    if (!positive(iperf_duration_s)) return "iperf_duration_s";
    if (nar_avg_samples < 1) return "nar_avg_samples";
    return std::nullopt;
}

nlohmann::json params_to_json(const EngineParams& p) {
    return {{"safety_margin_db", p.safety_margin_db},
            {"max_time_search_s", p.max_time_search_s},
            {"y_ticks", p.y_ticks},
            {"adjust_iterations", p.adjust_iterations},
            {"preamp_threshold_dbm_m2", p.preamp_threshold.dbm_per_m2()},
            {"n_samples", p.n_samples},
            {"int_sample_time_s", p.int_sample_time_s},
            {"thre_inc_percent", p.thre_inc_percent},
            {"wide_span_start_hz", p.wide_span_start.in_hz()},
            {"wide_span_stop_hz", p.wide_span_stop.in_hz()},
            {"ref_level_active_vpm", p.ref_level_active.volts_per_meter()},
            {"iperf_duration_s", p.iperf_duration_s},
            {"nar_avg_samples", p.nar_avg_samples},
            {"per_band_peak", p.per_band_peak}};
}

EngineParams params_from_json(const nlohmann::json& doc) {
    namespace jf = json_field;
    if (!doc.is_object()) throw ConfigError("", "engine parameters must be an object");
    static const std::set<std::string> known{
        "safety_margin_db",  "max_time_search_s",  "y_ticks",         "adjust_iterations",
        "preamp_threshold_dbm_m2", "n_samples",   "int_sample_time_s", "thre_inc_percent",
        "wide_span_start_hz", "wide_span_stop_hz", "ref_level_active_vpm", "iperf_duration_s",
        "nar_avg_samples",   "per_band_peak"};
    for (const auto& [key, value] : doc.items())
        if (!known.contains(key)) throw ConfigError(key, "unknown parameter");

    EngineParams p;
    auto num = [&](const char* key, double& out) {
        if (doc.contains(key)) out = jf::number(doc, key, "");
    };
    auto integer = [&](const char* key, int& out) {
        if (doc.contains(key)) out = static_cast<int>(jf::integer(doc, key, ""));
    };
    num("safety_margin_db", p.safety_margin_db);
    num("max_time_search_s", p.max_time_search_s);
    integer("y_ticks", p.y_ticks);
    integer("adjust_iterations", p.adjust_iterations);
    if (doc.contains("preamp_threshold_dbm_m2"))
        p.preamp_threshold = PowerDensityLog{jf::number(doc, "preamp_threshold_dbm_m2", "")};
    integer("n_samples", p.n_samples);
    num("int_sample_time_s", p.int_sample_time_s);
    num("thre_inc_percent", p.thre_inc_percent);
    if (doc.contains("wide_span_start_hz"))
        p.wide_span_start = Frequency::hz(jf::integer(doc, "wide_span_start_hz", ""));
    if (doc.contains("wide_span_stop_hz")) p.wide_span_stop = Frequency::hz(jf::integer(doc, "wide_span_stop_hz", ""));
    if (doc.contains("ref_level_active_vpm"))
        p.ref_level_active = FieldStrength{jf::number(doc, "ref_level_active_vpm", "")};
    num("iperf_duration_s", p.iperf_duration_s);
    integer("nar_avg_samples", p.nar_avg_samples);
    if (doc.contains("per_band_peak")) p.per_band_peak = jf::boolean(doc, "per_band_peak", "");

    if (auto bad = p.invalid_field()) throw ConfigError(*bad, "out of range");
    return p;
}

EngineParams load_params(const std::filesystem::path& path) { return params_from_json(read_json_file(path)); }

std::string serialize_params(const EngineParams& p) { return params_to_json(p).dump(2) + "\n"; }

}  // namespace emfa::engine
