#include "emfa/sim/instrument_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace emfa::sim {

using scpi::Command;
using scpi::encode_error;
namespace err = scpi::err;

namespace {

std::string reading_text(double v) {
    char buf[48];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return ec == std::errc{} ? std::string(buf, end) : std::string("0");
}

std::optional<std::int64_t> parse_hz(std::string_view s) {
    auto v = scpi::parse_number(s);
    if (!v || *v != std::floor(*v)) return std::nullopt;
    return static_cast<std::int64_t>(*v);
}

bool in_instrument_range(Frequency f) { return kMinSpanFrequency <= f && f <= kMaxSpanFrequency; }

bool ascii_printable(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 0x20 && c < 0x7f; });
}

}  // namespace

InstrumentModel::InstrumentModel(std::shared_ptr<const SceneState> scene)
    : scene_(std::move(scene)), noise_(scene_->snapshot().rng_seed) {}

int InstrumentModel::sweep_points(const Scene& scene) const {
    return sweep_points_.value_or(scene.default_sweep_points);
}

std::string InstrumentModel::handle(std::string_view line) {
    if (line.empty() || !ascii_printable(line)) return encode_error(err::kMalformed);
    auto [header, args] = scpi::split_command(line);
    auto cmd = scpi::command_for_header(header);
    if (!cmd) return encode_error(err::kMalformed);

    switch (*cmd) {
        case Command::Identify:
            return args.empty() ? std::string(kIdentity) : encode_error(err::kMalformed);
        case Command::QueryMaxLevel:
        case Command::QueryChannelPower:
            return handle_span_query(*cmd, args);
        case Command::QueryTrace:
            return args.empty() ? handle_trace() : encode_error(err::kMalformed);
        case Command::ResetTrace:
            if (!args.empty()) return encode_error(err::kMalformed);
            held_peak_.clear();
            held_trace_.clear();
            return std::string(scpi::kAck);
        default:
            return handle_set(*cmd, args);
    }
}

std::string InstrumentModel::handle_set(Command c, std::string_view args) {
    if (args.empty()) return encode_error(err::kMalformed);
    const Scene scene = scene_->snapshot();
    auto number = scpi::parse_number(args);

    switch (c) {
        case Command::SetUnit:
            if (args == "DBM_M2") unit_ = MeasureUnit::DbmPerM2;
            else if (args == "VPM") unit_ = MeasureUnit::VoltsPerMeter;
            else return encode_error(err::kBadArgument);
            break;
        case Command::SetFreqStart:
        case Command::SetFreqStop: {
            auto hz = parse_hz(args);
            if (!hz) return encode_error(err::kBadArgument);
            const auto f = Frequency::hz(*hz);
            if (!in_instrument_range(f)) return encode_error(err::kInvalidSpan);
            (c == Command::SetFreqStart ? f_start_ : f_stop_) = f;
            break;
        }
        case Command::SetAttenuation:
            if (!number || *number < 0.0) return encode_error(err::kBadArgument);
            attenuation_db_ = *number;
            break;
        case Command::SetResolutionBw:
        case Command::SetVideoBw: {
            auto hz = parse_hz(args);
            if (!hz || *hz <= 0) return encode_error(err::kBadArgument);
            (c == Command::SetResolutionBw ? rbw_ : vbw_) = Frequency::hz(*hz);
            break;
        }
        case Command::SetSweepPoints: {
            auto n = parse_hz(args);
            if (!n || *n < 2 || *n > 100'001) return encode_error(err::kBadArgument);
            sweep_points_ = static_cast<int>(*n);
            break;
        }
        case Command::SetTraceDetector:
            if (!scpi::parse_trace_detector(args)) return encode_error(err::kBadArgument);
            break;
        case Command::SetTypeDetector: {
            auto d = scpi::parse_type_detector(args);
            if (!d) return encode_error(err::kBadArgument);
            type_detector_ = *d;
            break;
        }
        case Command::SetAverageCount: {
            auto n = parse_hz(args);
            if (!n || *n < 1 || *n > 10'000) return encode_error(err::kBadArgument);
            avg_samples_ = static_cast<int>(*n);
            break;
        }
        case Command::SetPreamp:
            if (args == "ON") preamp_ = true;
            else if (args == "OFF") preamp_ = false;
            else return encode_error(err::kBadArgument);
            break;
        case Command::SetRefLevel: {
            if (!number) return encode_error(err::kBadArgument);
            const double limit = express(scene.max_ref_level, unit_);
            if (unit_ == MeasureUnit::VoltsPerMeter && *number <= 0.0) return encode_error(err::kBadArgument);
            if (*number > limit) return encode_error(err::kOutOfRange);
            ref_level_ = *number;
            break;
        }
        case Command::SetScaleDiv:
            if (!number || !(*number > 0.0)) return encode_error(err::kBadArgument);
            scale_div_ = *number;
            break;
        default:
            return encode_error(err::kMalformed);
    }
    return std::string(scpi::kAck);
}

std::string InstrumentModel::handle_span_query(Command c, std::string_view args) {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) return encode_error(err::kMalformed);
    auto lo = parse_hz(args.substr(0, comma));
    auto hi = parse_hz(args.substr(comma + 1));
    if (!lo || !hi) return encode_error(err::kBadArgument);
    const auto f_min = Frequency::hz(*lo);
    const auto f_max = Frequency::hz(*hi);
    if (!(f_min < f_max) || !in_instrument_range(f_min) || !in_instrument_range(f_max))
        return encode_error(err::kInvalidSpan);

    const bool max_query = c == Command::QueryMaxLevel;
    if (max_query && type_detector_ == scpi::TypeDetector::RollingAverage)
        return encode_error(err::kDetectorMismatch);

    const Scene scene = scene_->snapshot();
    const auto expected = expected_channel_reading(scene, f_min, f_max, preamp_);
    if (expected.over_range) return encode_error(err::kAdcOverRange);

    const double sigma = jitter_sigma_db(scene, preamp_, type_detector_, avg_samples_);
    double level = expected.level.dbm_per_m2() + sigma * noise_.gaussian();
    if (type_detector_ != scpi::TypeDetector::RollingAverage) {
        auto [it, inserted] = held_peak_.try_emplace({*lo, *hi}, level);
        if (!inserted) it->second = level = std::max(it->second, level);
    }
    return reading_text(express(PowerDensityLog{level}, unit_));
}

std::string InstrumentModel::handle_trace() {
    if (!(f_start_ < f_stop_)) return encode_error(err::kInvalidSpan);
    const Scene scene = scene_->snapshot();
    const auto grid = scpi::trace_grid(f_start_, f_stop_, sweep_points(scene));
    const double sigma = jitter_sigma_db(scene, preamp_, type_detector_, avg_samples_);

    std::vector<double> sweep;
    sweep.reserve(grid.size());
    for (const auto f : grid) {
        const auto expected = expected_point_reading(scene, f, preamp_);
        if (expected.over_range) return encode_error(err::kAdcOverRange);
        sweep.push_back(expected.level.dbm_per_m2() + sigma * noise_.gaussian());
    }
    const std::pair span{f_start_.in_hz(), f_stop_.in_hz()};
    if (type_detector_ != scpi::TypeDetector::RollingAverage) {
        if (held_trace_.size() == sweep.size() && held_trace_span_ == span) {
            for (std::size_t i = 0; i < sweep.size(); ++i) sweep[i] = std::max(sweep[i], held_trace_[i]);
        }
        held_trace_ = sweep;
        held_trace_span_ = span;
    }

    std::string out = std::to_string(f_start_.in_hz()) + "," + std::to_string(f_stop_.in_hz());
    for (double v : sweep) {
        out += ',';
        out += reading_text(express(PowerDensityLog{v}, unit_));
    }
    return out;
}

}  // namespace emfa::sim
