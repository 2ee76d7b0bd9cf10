#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "emfa/core/units.hpp"

namespace emfa::engine {

/// Tunables of the measurement algorithms. Defaults are the values used in
/// the W3 campaign.
struct EngineParams {
    double safety_margin_db = 10.0;
    double max_time_search_s = 5.0;
    int y_ticks = 10;
    int adjust_iterations = 3;
    PowerDensityLog preamp_threshold{-48.77};
    int n_samples = 12;
    double int_sample_time_s = 0.5;
    double thre_inc_percent = 30.0;
    Frequency wide_span_start = Frequency::mhz(791);
    Frequency wide_span_stop = Frequency::mhz(3620);
    FieldStrength ref_level_active{6.0};
    double iperf_duration_s = 120.0;
    int nar_avg_samples = 100;
    /// Compare wide-span scans per band peak instead of per grid point.
    bool per_band_peak = false;

    /// Empty when valid, else the name of the first bad field.
    [[nodiscard]] std::optional<std::string> invalid_field() const;

    bool operator==(const EngineParams&) const = default;
};

nlohmann::json params_to_json(const EngineParams& p);
/// Missing keys keep their defaults; unknown keys are rejected. Throws ConfigError.
EngineParams params_from_json(const nlohmann::json& doc);
EngineParams load_params(const std::filesystem::path& path);
std::string serialize_params(const EngineParams& p);

}  // namespace emfa::engine
