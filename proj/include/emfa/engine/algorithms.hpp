#pragma once

#include <string>
#include <vector>

#include "emfa/core/band.hpp"
#include "emfa/core/clock.hpp"
#include "emfa/core/series.hpp"
#include "emfa/engine/errors.hpp"
#include "emfa/engine/params.hpp"
#include "emfa/scpi/client.hpp"

namespace emfa::engine {

/// Initial value of the running maximum in the level search.
inline constexpr double kSearchSentinel = -200.0;

struct AdjustResult {
    double ref_level = 0.0;
    double scale_div = 0.0;
    bool preamp = false;

    bool operator==(const AdjustResult&) const = default;
};

/// Applies `settings` with the given pre-amplifier state, resets the trace,
/// polls the band peak once per second for max_time_search seconds, then sets
/// ref_level = ceil(max) + safety_margin and
/// scale_div = |ref_level - min_level| / y_ticks on the instrument.
/// Throws DegenerateSignal when no reading beats kSearchSentinel.
AdjustResult adjust_ref_level_scale_div(scpi::Instrument& instr, Clock& clock, scpi::InstrumentSettings settings,
                                        const Band& band, const EngineParams& params, bool preamp,
                                        double min_level);

/// Pre-amplifier branch after the preamp-off adjustment `last`. Below the
/// threshold the pre-amp is switched on and the adjustment repeated against
/// the preamp-on floor; a rejected pre-amp or a new reference level at or
/// above the threshold switches it off again, restores `last` on the
/// instrument and repeats the preamp-off adjustment once.
AdjustResult preamp_management(scpi::Instrument& instr, Clock& clock, const scpi::InstrumentSettings& settings,
                               const Band& band, const BandPlan& plan, const EngineParams& params,
                               const AdjustResult& last);

/// n_samples channel-power readings spaced int_sample_time apart. Throws
/// PartialSeries when a query fails.
ExposureSeries nar_band_meas(scpi::Instrument& instr, Clock& clock, const scpi::InstrumentSettings& settings,
                             const Band& band, const EngineParams& params, ExposureSource source);

/// Percent increase of v2 over v1 on linear field values, guarded by the
/// floor-equivalent field `epsilon`.
double incr_percent(double v2, double v1, double epsilon);

/// Bands whose wide-span level rose by more than thre_inc percent between
/// the two scans, plus the downlink pair of every marked uplink band, ordered
/// by f_start. Grid points outside every band are ignored. Throws
/// GridMismatch unless both traces share one grid.
std::vector<std::string> sel_band_use(const SpectrumTrace& span1, const SpectrumTrace& span2, const BandPlan& plan,
                                      double thre_inc_percent, bool per_band_peak = false);

// Instrument settings used by the phases.
scpi::InstrumentSettings p1_adjust_settings(const Band& band);
scpi::InstrumentSettings p1_nar_settings(const Band& band, const AdjustResult& adjusted, const EngineParams& params);
scpi::InstrumentSettings active_nar_settings(const Band& band, const EngineParams& params);
scpi::InstrumentSettings wide_span_settings(const EngineParams& params);

/// Wide-span max-hold sweep: resets the trace, then reads it once per second
/// for max_time_search seconds and returns the last (held) trace.
SpectrumTrace wide_span_scan(scpi::Instrument& instr, Clock& clock, const EngineParams& params);

}  // namespace emfa::engine
