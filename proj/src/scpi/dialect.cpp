#include "emfa/scpi/dialect.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "emfa/core/io.hpp"

namespace emfa::scpi {

std::optional<std::string> InstrumentSettings::invalid_field() const {
    if (!f_start.valid()) return "f_start";
    if (!(f_start < f_stop)) return "f_stop";
    if (attenuation_db && !(std::isfinite(*attenuation_db) && *attenuation_db >= 0.0)) return "attenuation";
    if (resolution_bw && !resolution_bw->valid()) return "resolution_bw";
    if (video_bw && !video_bw->valid()) return "video_bw";
    if (sweep_points && *sweep_points < 2) return "sweep_points";
    if (avg_samples && *avg_samples < 1) return "avg_samples";
    if (ref_level && !std::isfinite(*ref_level)) return "ref_level";
    if (scale_div && !(std::isfinite(*scale_div) && *scale_div > 0.0)) return "scale_div";
    return std::nullopt;
}

const CommandSpec& spec_of(Command c) {
    for (const auto& s : kCommandTable)
        if (s.command == c) return s;
    throw std::logic_error("command missing from table");
}

std::optional<Command> command_for_header(std::string_view header) {
    for (const auto& s : kCommandTable)
        if (s.header == header) return s.command;
    return std::nullopt;
}

std::string_view to_token(MeasureUnit u) { return u == MeasureUnit::DbmPerM2 ? "DBM_M2" : "VPM"; }

std::string_view to_token(TypeDetector d) {
    switch (d) {
        case TypeDetector::RollingMax: return "RMAX";
        case TypeDetector::RollingAverage: return "RAVG";
        case TypeDetector::Max: return "MAX";
    }
    return "?";
}

std::string_view to_token(TraceDetector) { return "RMS"; }

std::optional<TypeDetector> parse_type_detector(std::string_view s) {
    if (s == "RMAX") return TypeDetector::RollingMax;
    if (s == "RAVG") return TypeDetector::RollingAverage;
    if (s == "MAX") return TypeDetector::Max;
    return std::nullopt;
}

std::optional<TraceDetector> parse_trace_detector(std::string_view s) {
    if (s == "RMS") return TraceDetector::Rms;
    return std::nullopt;
}

namespace {

std::string line(Command c, std::string_view arg) {
    std::string out(spec_of(c).header);
    out += ' ';
    out += arg;
    return out;
}

std::string hz(Frequency f) { return std::to_string(f.in_hz()); }

}  // namespace

std::vector<EncodedSet> encode_settings(const InstrumentSettings& s) {
    std::vector<EncodedSet> out;
    auto add = [&](Command c, std::string_view arg) { out.push_back({c, line(c, arg)}); };

    add(Command::SetUnit, to_token(s.unit));
    add(Command::SetFreqStart, hz(s.f_start));
    add(Command::SetFreqStop, hz(s.f_stop));
    if (s.attenuation_db) add(Command::SetAttenuation, format_number(*s.attenuation_db));
    if (s.resolution_bw) add(Command::SetResolutionBw, hz(*s.resolution_bw));
    if (s.video_bw) add(Command::SetVideoBw, hz(*s.video_bw));
    if (s.sweep_points) add(Command::SetSweepPoints, std::to_string(*s.sweep_points));
    if (s.trace_detector) add(Command::SetTraceDetector, to_token(*s.trace_detector));
    if (s.type_detector) add(Command::SetTypeDetector, to_token(*s.type_detector));
    if (s.avg_samples) add(Command::SetAverageCount, std::to_string(*s.avg_samples));
    if (s.preamp) add(Command::SetPreamp, *s.preamp ? "ON" : "OFF");
    if (s.ref_level) add(Command::SetRefLevel, format_number(*s.ref_level));
    if (s.scale_div) add(Command::SetScaleDiv, format_number(*s.scale_div));
    return out;
}

std::string encode_span_query(Command q, Frequency f_min, Frequency f_max) {
    return line(q, hz(f_min) + "," + hz(f_max));
}

std::string encode_error(int code) { return "ERR " + std::to_string(code); }

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    const char c0 = text.front();
    const bool starts_ok = (c0 >= '0' && c0 <= '9') || c0 == '-' || c0 == '.';
    if (!starts_ok) return std::nullopt;
    if (c0 == '-' && (text.size() < 2 || !((text[1] >= '0' && text[1] <= '9') || text[1] == '.')))
        return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::vector<double>> parse_number_list(std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        auto v = parse_number(text.substr(0, comma));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::optional<int> parse_error_frame(std::string_view l) {
    if (!l.starts_with("ERR ")) return std::nullopt;
    l.remove_prefix(4);
    int code = 0;
    auto [ptr, ec] = std::from_chars(l.data(), l.data() + l.size(), code);
    if (ec != std::errc{} || ptr != l.data() + l.size()) return std::nullopt;
    return code;
}

std::vector<Frequency> trace_grid(Frequency f_start, Frequency f_stop, int points) {
    std::vector<Frequency> grid;
    if (points < 2) return grid;
    grid.reserve(static_cast<std::size_t>(points));
    const auto span = f_stop.in_hz() - f_start.in_hz();
    for (int i = 0; i < points; ++i) {
        // Integer arithmetic so both ends produce the same grid bit for bit.
        grid.push_back(Frequency::hz(f_start.in_hz() + span * i / (points - 1)));
    }
    return grid;
}

std::pair<std::string_view, std::string_view> split_command(std::string_view l) {
    const auto sp = l.find(' ');
    if (sp == std::string_view::npos) return {l, {}};
    auto args = l.substr(sp + 1);
    while (!args.empty() && args.front() == ' ') args.remove_prefix(1);
    while (!args.empty() && (args.back() == ' ' || args.back() == '\r')) args.remove_suffix(1);
    return {l.substr(0, sp), args};
}

}  // namespace emfa::scpi
