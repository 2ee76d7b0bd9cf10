#include "emfa/core/series.hpp"

#include <algorithm>

namespace emfa {

std::string_view to_string(MeasureUnit u) {
    return u == MeasureUnit::DbmPerM2 ? "DBM_M2" : "VPM";
}

std::string_view to_string(ExposureSource s) {
    switch (s) {
        case ExposureSource::RbsEnvironmental: return "RBS_ENV";
        case ExposureSource::UeActive: return "UE_ACTIVE";
        case ExposureSource::RbsActive: return "RBS_ACTIVE";
    }
    return "?";
}

std::string_view to_string(TrafficDirection d) {
    return d == TrafficDirection::Uplink ? "UL" : "DL";
}

std::optional<MeasureUnit> parse_measure_unit(std::string_view s) {
    if (s == "DBM_M2") return MeasureUnit::DbmPerM2;
    if (s == "VPM") return MeasureUnit::VoltsPerMeter;
    return std::nullopt;
}

std::optional<ExposureSource> parse_exposure_source(std::string_view s) {
    if (s == "RBS_ENV") return ExposureSource::RbsEnvironmental;
    if (s == "UE_ACTIVE") return ExposureSource::UeActive;
    if (s == "RBS_ACTIVE") return ExposureSource::RbsActive;
    return std::nullopt;
}

std::optional<TrafficDirection> parse_direction(std::string_view s) {
    if (s == "UL" || s == "ul") return TrafficDirection::Uplink;
    if (s == "DL" || s == "dl") return TrafficDirection::Downlink;
    return std::nullopt;
}

bool SpectrumTrace::well_formed() const {
    if (!(f_start < f_stop)) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto f = points[i].frequency;
        if (f < f_start || f > f_stop) return false;
        if (i > 0 && !(points[i - 1].frequency < f)) return false;
    }
    return true;
}

bool SpectrumTrace::same_grid(const SpectrumTrace& other) const {
    return points.size() == other.points.size() &&
           std::equal(points.begin(), points.end(), other.points.begin(),
                      [](const TracePoint& a, const TracePoint& b) { return a.frequency == b.frequency; });
}

std::vector<double> ExposureSeries::values() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.value);
    return out;
}

bool ExposureSeries::timestamps_ordered() const {
    return std::is_sorted(samples.begin(), samples.end(),
                          [](const Sample& a, const Sample& b) { return a.timestamp_s < b.timestamp_s; });
}

}  // namespace emfa
