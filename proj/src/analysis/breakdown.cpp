#include "emfa/analysis/breakdown.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "emfa/analysis/stats.hpp"
#include "emfa/analysis/units.hpp"

namespace emfa::analysis {

Component series_density(const ExposureSeries& series) {
    const std::vector<double> v = series.values();
    if (v.empty()) return {};
    const Unit u = unit_of(series.unit);
    Interval ci{0.0, 0.0};
    if (v.size() >= 2) {
        ci = confidence_interval(v);
    } else {
        ci.mean = v.front();
    }
    const double mean_w = to_watts(ci.mean, u);
    if (ci.halfwidth == 0.0) return {PowerDensity{mean_w}, 0.0};
    const double lo = u == Unit::VoltsPerMeter ? std::max(ci.mean - ci.halfwidth, 0.0) : ci.mean - ci.halfwidth;
    const double hi = ci.mean + ci.halfwidth;
    return {PowerDensity{mean_w}, (to_watts(hi, u) - to_watts(lo, u)) / 2.0};
}

namespace {

struct Accumulator {
    double sum = 0.0;
    double var = 0.0;

    void add(const Component& c) {
        sum += c.density.watts_per_m2();
        var += c.ci_halfwidth_wpm2 * c.ci_halfwidth_wpm2;
    }
    [[nodiscard]] Component result() const { return {PowerDensity{sum}, std::sqrt(var)}; }
};

void check(const ExposureSeries& s, const BandPlan& plan, std::string_view phase, MeasureUnit unit,
           ExposureSource source) {
    if (!plan.find(s.band_id)) throw DataError(std::string(phase) + ": band '" + s.band_id + "' not in plan");
    if (s.unit != unit) {
        throw DataError(std::string(phase) + ": series for '" + s.band_id + "' is in " + std::string(to_string(s.unit)) +
                        ", expected " + std::string(to_string(unit)));
    }
    if (s.source != source) {
        throw DataError(std::string(phase) + ": series for '" + s.band_id + "' has source " +
                        std::string(to_string(s.source)));
    }
}

}  // namespace

ExposureBreakdown aggregate_session(const Session& session, const BandPlan& plan) {
    Accumulator env, pre5g, nr, active;
    for (const auto& s : session.phase1) {
        check(s, plan, "phase1", MeasureUnit::DbmPerM2, ExposureSource::RbsEnvironmental);
        env.add(series_density(s));
    }
    for (const auto& s : session.phase2) {
        check(s, plan, "phase2", MeasureUnit::VoltsPerMeter, ExposureSource::UeActive);
        (plan.at(s.band_id).generation == Generation::NR ? nr : pre5g).add(series_density(s));
    }
    for (const auto& s : session.phase3) {
        check(s, plan, "phase3", MeasureUnit::VoltsPerMeter, ExposureSource::RbsActive);
        active.add(series_density(s));
    }
    return {env.result(), pre5g.result(), nr.result(), active.result()};
}

double ue_share(const ExposureBreakdown& b) {
    const double total = b.total().watts_per_m2();
    if (!(total > 0.0)) throw UndefinedRatio("UE share undefined for zero total exposure");
    return 100.0 * (b.ue_active_pre5g.density.watts_per_m2() + b.ue_active_5g.density.watts_per_m2()) / total;
}

FieldStrength total_field(const ExposureBreakdown& b) { return to_field(b.total()); }

double exposure_per_mbps(FieldStrength total, double throughput_mbps) {
    if (!(throughput_mbps > 0.0)) throw UndefinedRatio("exposure-per-Mbps undefined for zero throughput");
    return total.volts_per_meter() / throughput_mbps;
}

std::map<std::string, int> band_occurrence(std::span<const Session> sessions) {
    std::map<std::string, int> hist;
    for (const auto& s : sessions) {
        const std::set<std::string> unique(s.selected_bands.begin(), s.selected_bands.end());
        for (const auto& id : unique) ++hist[id];
    }
    return hist;
}

}  // namespace emfa::analysis
