#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "emfa/core/band.hpp"
#include "emfa/core/series.hpp"
#include "emfa/core/units.hpp"

namespace emfa::analysis {

/// Session content inconsistent with the measurement protocol.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedRatio : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Component {
    PowerDensity density;
    double ci_halfwidth_wpm2 = 0.0;
};

/// Exposure by source, all in W/m^2.
struct ExposureBreakdown {
    Component rbs_env;
    Component ue_active_pre5g;
    Component ue_active_5g;
    Component rbs_active;

    [[nodiscard]] PowerDensity total() const {
        return rbs_env.density + ue_active_pre5g.density + ue_active_5g.density + rbs_active.density;
    }
};

/// Mean density and interval halfwidth of one series in W/m^2. The interval
/// is computed on the native unit and its bounds converted; a single sample
/// has zero halfwidth.
Component series_density(const ExposureSeries& series);

/// P1 series feed rbs_env, P2 series are split by band generation, P3 series
/// feed rbs_active. Band densities add; halfwidths add in quadrature.
/// Throws DataError for a band missing from the plan or a series whose unit
/// or source does not belong to its phase.
ExposureBreakdown aggregate_session(const Session& session, const BandPlan& plan);

/// Percentage of the total due to the smartphone. UndefinedRatio for a zero total.
double ue_share(const ExposureBreakdown& b);

/// Field equivalent of the summed densities.
FieldStrength total_field(const ExposureBreakdown& b);

/// V/m per Mbps. UndefinedRatio for non-positive throughput.
double exposure_per_mbps(FieldStrength total, double throughput_mbps);

/// Number of sessions selecting each band.
std::map<std::string, int> band_occurrence(std::span<const Session> sessions);

}  // namespace emfa::analysis
