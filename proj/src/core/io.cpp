#include "emfa/core/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace emfa {

using nlohmann::json;

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

json parse_json_text(std::string_view text, std::string_view origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::string where = origin.empty() ? std::string{} : std::string(origin) + " ";
        where += line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError(where, "syntax error");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    return parse_json_text(read_text_file(path), path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

namespace json_field {

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "missing field");
    return *it;
}

std::string string(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

double number(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    return v.get<double>();
}

std::int64_t integer(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<std::int64_t>();
}

bool boolean(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
    return v.get<bool>();
}

}  // namespace json_field

namespace jf = json_field;

// ---------------------------------------------------------------- band plan

json band_plan_to_json(const BandPlan& plan) {
    json bands = json::array();
    for (const auto& b : plan.bands) {
        json jb = {
            {"id", b.id},
            {"label", b.label},
            {"f_start_hz", b.f_start.in_hz()},
            {"f_stop_hz", b.f_stop.in_hz()},
            {"duplex", to_string(b.duplex)},
            {"generation", to_string(b.generation)},
        };
        if (b.paired_band) jb["paired_band"] = *b.paired_band;
        bands.push_back(std::move(jb));
    }
    json floor = json::array();
    for (const auto& r : plan.noise_floor.rows) {
        floor.push_back({{"band_id", r.band_id},
                         {"preamp_off_dbm_m2", r.level_preamp_off.dbm_per_m2()},
                         {"preamp_on_dbm_m2", r.level_preamp_on.dbm_per_m2()}});
    }
    return json{{"operator", plan.operator_name}, {"bands", bands}, {"noise_floor", floor}};
}

BandPlan band_plan_from_json(const json& doc) {
    BandPlan plan;
    plan.operator_name = jf::string(doc, "operator", "");
    const json& bands = jf::require(doc, "bands", "");
    if (!bands.is_array()) throw ConfigError("bands", "expected a list");
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const std::string p = jf::index("bands", i);
        const json& jb = bands[i];
        Band b;
        b.id = jf::string(jb, "id", p);
        b.label = jb.contains("label") ? jf::string(jb, "label", p) : b.id;
        b.f_start = Frequency::hz(jf::integer(jb, "f_start_hz", p));
        b.f_stop = Frequency::hz(jf::integer(jb, "f_stop_hz", p));
        auto duplex = parse_duplex(jf::string(jb, "duplex", p));
        if (!duplex) throw ConfigError(jf::join(p, "duplex"), "expected FDD_UL, FDD_DL or TDD");
        b.duplex = *duplex;
        auto gen = parse_generation(jf::string(jb, "generation", p));
        if (!gen) throw ConfigError(jf::join(p, "generation"), "expected PRE5G or NR");
        b.generation = *gen;
        if (jb.contains("paired_band")) b.paired_band = jf::string(jb, "paired_band", p);
        plan.bands.push_back(std::move(b));
    }
    const json& floor = jf::require(doc, "noise_floor", "");
    if (!floor.is_array()) throw ConfigError("noise_floor", "expected a list");
    for (std::size_t i = 0; i < floor.size(); ++i) {
        const std::string p = jf::index("noise_floor", i);
        plan.noise_floor.rows.push_back(
            {jf::string(floor[i], "band_id", p), PowerDensityLog{jf::number(floor[i], "preamp_off_dbm_m2", p)},
             PowerDensityLog{jf::number(floor[i], "preamp_on_dbm_m2", p)}});
    }
    return plan;
}

std::string serialize_band_plan(const BandPlan& plan) { return band_plan_to_json(plan).dump(2) + "\n"; }

BandPlan parse_band_plan(std::string_view text) { return band_plan_from_json(parse_json_text(text)); }

BandPlan load_band_plan(const std::filesystem::path& path) {
    return band_plan_from_json(read_json_file(path));
}

// ---------------------------------------------------------------- session

namespace {

json series_to_json(const std::vector<ExposureSeries>& list) {
    json out = json::array();
    for (const auto& s : list) {
        json samples = json::array();
        for (const auto& x : s.samples) samples.push_back(json::array({x.timestamp_s, x.value}));
        out.push_back({{"band_id", s.band_id},
                       {"unit", to_string(s.unit)},
                       {"source", to_string(s.source)},
                       {"samples", samples}});
    }
    return out;
}

std::vector<ExposureSeries> series_from_json(const json& doc, std::string_view key) {
    const json& arr = jf::require(doc, key, "");
    if (!arr.is_array()) throw ConfigError(std::string(key), "expected a list");
    std::vector<ExposureSeries> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = jf::index(std::string(key), i);
        ExposureSeries s;
        s.band_id = jf::string(arr[i], "band_id", p);
        auto unit = parse_measure_unit(jf::string(arr[i], "unit", p));
        if (!unit) throw ConfigError(jf::join(p, "unit"), "expected DBM_M2 or VPM");
        s.unit = *unit;
        auto src = parse_exposure_source(jf::string(arr[i], "source", p));
        if (!src) throw ConfigError(jf::join(p, "source"), "unknown exposure source");
        s.source = *src;
        const json& samples = jf::require(arr[i], "samples", p);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const json& pair = samples[k];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                throw ConfigError(jf::index(jf::join(p, "samples"), k), "expected [timestamp, value]");
            s.samples.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

json session_to_json(const Session& s) {
    json tput = json::array();
    for (const auto& t : s.throughput_log) tput.push_back(json::array({t.timestamp_s, t.mbps}));
    json notes = json::array();
    for (const auto& n : s.notes) notes.push_back({{"phase", n.phase}, {"message", n.message}});
    return json{
        {"schema_version", kSessionSchemaVersion},
        {"tool_version", kToolVersion},
        {"location_label", s.location_label},
        {"los", s.los},
        {"distance_to_rbs_m", s.distance_to_rbs_m},
        {"direction", to_string(s.direction)},
        {"phase1", series_to_json(s.phase1)},
        {"selected_bands", s.selected_bands},
        {"phase2", series_to_json(s.phase2)},
        {"phase3", series_to_json(s.phase3)},
        {"throughput_log", tput},
        {"notes", notes},
    };
}

Session session_from_json(const json& doc) {
    const auto version = jf::integer(doc, "schema_version", "");
    if (version != kSessionSchemaVersion)
        throw SchemaVersionError("schema_version", "unsupported session schema version " +
                                                       std::to_string(version) + " (expected " +
                                                       std::to_string(kSessionSchemaVersion) + ")");
    Session s;
    s.location_label = jf::string(doc, "location_label", "");
    s.los = jf::boolean(doc, "los", "");
    s.distance_to_rbs_m = jf::number(doc, "distance_to_rbs_m", "");
    auto dir = parse_direction(jf::string(doc, "direction", ""));
    if (!dir) throw ConfigError("direction", "expected UL or DL");
    s.direction = *dir;
    s.phase1 = series_from_json(doc, "phase1");
    s.phase2 = series_from_json(doc, "phase2");
    s.phase3 = series_from_json(doc, "phase3");
    const json& sel = jf::require(doc, "selected_bands", "");
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (!sel[i].is_string()) throw ConfigError(jf::index("selected_bands", i), "expected a string");
        s.selected_bands.push_back(sel[i].get<std::string>());
    }
    const json& tput = jf::require(doc, "throughput_log", "");
    for (std::size_t i = 0; i < tput.size(); ++i) {
        const json& pair = tput[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ConfigError(jf::index("throughput_log", i), "expected [timestamp, mbps]");
        s.throughput_log.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    if (doc.contains("notes")) {
        const json& notes = doc["notes"];
        for (std::size_t i = 0; i < notes.size(); ++i) {
            const std::string p = jf::index("notes", i);
            s.notes.push_back({jf::string(notes[i], "phase", p), jf::string(notes[i], "message", p)});
        }
    }
    return s;
}

std::string serialize_session(const Session& session) { return session_to_json(session).dump(2) + "\n"; }

Session parse_session(std::string_view text) { return session_from_json(parse_json_text(text)); }

Session load_session(const std::filesystem::path& path) { return session_from_json(read_json_file(path)); }

std::string exposure_series_csv(const std::vector<ExposureSeries>& series) {
    std::string out = "timestamp_s,band_id,unit,value,source\n";
    for (const auto& s : series) {
        for (const auto& x : s.samples) {
            out += format_number(x.timestamp_s);
            out += ',';
            out += s.band_id;
            out += ',';
            out += to_string(s.unit);
            out += ',';
            out += format_number(x.value);
            out += ',';
            out += to_string(s.source);
            out += '\n';
        }
    }
    return out;
}

}  // namespace emfa
