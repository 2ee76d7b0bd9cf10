#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emfa/core/band.hpp"
#include "emfa/core/series.hpp"

namespace emfa {

inline constexpr int kSessionSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "emfa 1.0.0";

/// Malformed configuration or document. `where` is a field path such as
/// "bands[3].f_stop_hz" or a "line L, column C" location for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    [[nodiscard]] const std::string& where() const { return where_; }

private:
    std::string where_;
};

class SchemaVersionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Parses text as JSON, mapping syntax errors to a line/column ConfigError.
nlohmann::json parse_json_text(std::string_view text, std::string_view origin = {});
nlohmann::json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form; used wherever output must be byte-stable.
std::string format_number(double v);

// Field accessors that report the offending path on failure.
namespace json_field {
const nlohmann::json& require(const nlohmann::json& obj, std::string_view key, const std::string& path);
std::string string(const nlohmann::json& obj, std::string_view key, const std::string& path);
double number(const nlohmann::json& obj, std::string_view key, const std::string& path);
std::int64_t integer(const nlohmann::json& obj, std::string_view key, const std::string& path);
bool boolean(const nlohmann::json& obj, std::string_view key, const std::string& path);
std::string join(const std::string& path, std::string_view key);
std::string index(const std::string& path, std::size_t i);
}  // namespace json_field

nlohmann::json band_plan_to_json(const BandPlan& plan);
BandPlan band_plan_from_json(const nlohmann::json& doc);
std::string serialize_band_plan(const BandPlan& plan);
BandPlan parse_band_plan(std::string_view text);
BandPlan load_band_plan(const std::filesystem::path& path);

nlohmann::json session_to_json(const Session& session);
Session session_from_json(const nlohmann::json& doc);
std::string serialize_session(const Session& session);
Session parse_session(std::string_view text);
Session load_session(const std::filesystem::path& path);

/// CSV with header timestamp_s,band_id,unit,value,source.
std::string exposure_series_csv(const std::vector<ExposureSeries>& series);

}  // namespace emfa
