#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "emfa/scpi/dialect.hpp"

// Reference computations written straight from the algorithm descriptions,
// independent of the engine code.
namespace emfa::test {

struct AdjustOracle {
    double ref_level;
    double scale_div;
};

/// The reference-level search line by line: running max from -200 over the polled readings,
/// ref = ceil(max) + margin, scale = |ref - min_l| / y_ticks.
inline AdjustOracle alg1_oracle(const std::vector<double>& readings, double min_l, double margin, int y_ticks) {
    double max_l = -200.0;
    for (double r : readings)
        if (r > max_l) max_l = r;
    const double ref = std::ceil(max_l) + margin;
    return {ref, std::fabs(ref - min_l) / y_ticks};
}

struct PreampOracle {
    double ref_level;
    double scale_div;
    bool preamp;
};

/// The pre-amplifier flowchart: below the threshold try the pre-amp; keep it
/// only if it is accepted and the new reference level stays below the
/// threshold, otherwise go back to the levels found without it.
inline PreampOracle flowchart_oracle(double level_off, double level_on, bool over_range, double floor_off,
                                     double floor_on, double threshold, double margin, int y_ticks) {
    const double ref_off = std::ceil(level_off) + margin;
    const PreampOracle off{ref_off, std::fabs(ref_off - floor_off) / y_ticks, false};
    if (!(ref_off < threshold)) return off;
    if (over_range) return off;
    const double ref_on = std::ceil(level_on) + margin;
    if (ref_on < threshold) return {ref_on, std::fabs(ref_on - floor_on) / y_ticks, true};
    return off;
}

/// Minimal analyzer double: constant max level per pre-amp state, optional
/// over-range with the pre-amp on, fixed channel power, OK for every set.
struct FakeAnalyzer {
    double level_off = -60.0;
    double level_on = -60.0;
    bool over_range_with_preamp = false;
    double channel_power = -60.0;
    bool preamp = false;
    int chp_failures_after = -1;  // ERR 101 from the n-th channel-power query on
    int chp_queries = 0;

    std::string operator()(const std::string& line) {
        const auto [header, args] = scpi::split_command(line);
        if (header == "INP:GAIN:STAT") {
            preamp = args == "ON";
            return "OK";
        }
        if (header == "CALC:MAX?") {
            if (preamp && over_range_with_preamp) return "ERR 220";
            return std::to_string(preamp ? level_on : level_off);
        }
        if (header == "CALC:CHP?") {
            if (chp_failures_after >= 0 && chp_queries >= chp_failures_after) return "ERR 101";
            ++chp_queries;
            return std::to_string(channel_power);
        }
        return "OK";
    }
};

}  // namespace emfa::test
