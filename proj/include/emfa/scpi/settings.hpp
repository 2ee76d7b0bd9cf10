#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emfa/core/series.hpp"
#include "emfa/core/units.hpp"

namespace emfa::scpi {

enum class TypeDetector { RollingMax, RollingAverage, Max };
enum class TraceDetector { Rms };

/// The spectrum-analyzer parameter vector. An empty optional means AUTO:
/// the field is left at the instrument's current/default value and no
/// command is emitted for it.
struct InstrumentSettings {
    MeasureUnit unit = MeasureUnit::DbmPerM2;
    Frequency f_start;
    Frequency f_stop;
    std::optional<double> attenuation_db;
    std::optional<Frequency> resolution_bw;
    std::optional<Frequency> video_bw;
    std::optional<int> sweep_points;
    std::optional<TraceDetector> trace_detector;
    std::optional<TypeDetector> type_detector;
    std::optional<int> avg_samples;
    std::optional<bool> preamp;
    std::optional<double> ref_level;  // in `unit`
    std::optional<double> scale_div;

    /// Empty when the invariants hold, else the name of the first bad field.
    [[nodiscard]] std::optional<std::string> invalid_field() const;

    bool operator==(const InstrumentSettings&) const = default;
};

}  // namespace emfa::scpi
