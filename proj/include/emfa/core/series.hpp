#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emfa/core/units.hpp"

namespace emfa {

/// Instrument display/measurement unit. Shared by settings and series.
enum class MeasureUnit { DbmPerM2, VoltsPerMeter };

enum class ExposureSource { RbsEnvironmental, UeActive, RbsActive };
enum class TrafficDirection { Uplink, Downlink };

std::string_view to_string(MeasureUnit u);
std::string_view to_string(ExposureSource s);
std::string_view to_string(TrafficDirection d);
std::optional<MeasureUnit> parse_measure_unit(std::string_view s);
std::optional<ExposureSource> parse_exposure_source(std::string_view s);
std::optional<TrafficDirection> parse_direction(std::string_view s);

struct TracePoint {
    Frequency frequency;
    FieldStrength field;

    bool operator==(const TracePoint&) const = default;
};

/// One wide-span sweep. Point frequencies are strictly increasing and lie
/// within [f_start, f_stop].
struct SpectrumTrace {
    Frequency f_start;
    Frequency f_stop;
    std::vector<TracePoint> points;

    [[nodiscard]] bool well_formed() const;
    [[nodiscard]] bool same_grid(const SpectrumTrace& other) const;

    bool operator==(const SpectrumTrace&) const = default;
};

struct Sample {
    double timestamp_s = 0.0;
    double value = 0.0;

    bool operator==(const Sample&) const = default;
};

/// Timed narrow-band readings for one band, in the unit the instrument used.
struct ExposureSeries {
    std::string band_id;
    MeasureUnit unit = MeasureUnit::DbmPerM2;
    ExposureSource source = ExposureSource::RbsEnvironmental;
    std::vector<Sample> samples;

    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] bool timestamps_ordered() const;

    bool operator==(const ExposureSeries&) const = default;
};

struct ThroughputSample {
    double timestamp_s = 0.0;
    double mbps = 0.0;

    bool operator==(const ThroughputSample&) const = default;
};

/// A recorded failure inside a phase; the session keeps whatever was measured.
struct PhaseNote {
    std::string phase;
    std::string message;

    bool operator==(const PhaseNote&) const = default;
};

/// One measurement campaign at one location.
struct Session {
    std::string location_label;
    bool los = false;
    double distance_to_rbs_m = 0.0;
    TrafficDirection direction = TrafficDirection::Uplink;
    std::vector<ExposureSeries> phase1;
    std::vector<std::string> selected_bands;
    std::vector<ExposureSeries> phase2;
    std::vector<ExposureSeries> phase3;
    std::vector<ThroughputSample> throughput_log;
    std::vector<PhaseNote> notes;

    bool operator==(const Session&) const = default;
};

}  // namespace emfa
