#include "emfa/engine/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "emfa/scpi/dialect.hpp"

namespace emfa::engine {

using scpi::InstrumentSettings;

AdjustResult adjust_ref_level_scale_div(scpi::Instrument& instr, Clock& clock, InstrumentSettings settings,
                                        const Band& band, const EngineParams& params, bool preamp,
                                        double min_level) {
    settings.preamp = preamp;
    instr.apply_settings(settings);
    instr.reset_trace();

    double max_l = kSearchSentinel;
    const int polls = static_cast<int>(std::ceil(params.max_time_search_s));
    for (int i = 0; i < polls; ++i) {
        max_l = std::max(max_l, instr.query_max_level(band.f_start, band.f_stop));
        clock.sleep_seconds(1.0);
    }
    if (!(max_l > kSearchSentinel)) throw DegenerateSignal(band.id);

    AdjustResult r;
    r.preamp = preamp;
    r.ref_level = std::ceil(max_l) + params.safety_margin_db;
    instr.set_ref_level(r.ref_level);
    r.scale_div = std::abs(r.ref_level - min_level) / params.y_ticks;
    instr.set_scale_div(r.scale_div);
    return r;
}

AdjustResult preamp_management(scpi::Instrument& instr, Clock& clock, const InstrumentSettings& settings,
                               const Band& band, const BandPlan& plan, const EngineParams& params,
                               const AdjustResult& last) {
    const double threshold = params.preamp_threshold.dbm_per_m2();
    if (!(last.ref_level < threshold)) return last;

    try {
        instr.set_preamp(true);
        const AdjustResult on = adjust_ref_level_scale_div(instr, clock, settings, band, params, true,
                                                           plan.min_level(band.id, true).dbm_per_m2());
        if (on.ref_level < threshold) return on;
    } catch (const scpi::PreampRejected&) {
    } catch (const scpi::QueryFailed& e) {
        if (e.code() != scpi::err::kAdcOverRange) throw;
    }

    // Back to the last values before pre-amplification, then one more pass.
    if (instr.preamp().value_or(true)) instr.set_preamp(false);
    instr.set_ref_level(last.ref_level);
    instr.set_scale_div(last.scale_div);
    InstrumentSettings restored = settings;
    restored.ref_level = last.ref_level;
    restored.scale_div = last.scale_div;
    return adjust_ref_level_scale_div(instr, clock, restored, band, params, false,
                                      plan.min_level(band.id, false).dbm_per_m2());
}

ExposureSeries nar_band_meas(scpi::Instrument& instr, Clock& clock, const InstrumentSettings& settings,
                             const Band& band, const EngineParams& params, ExposureSource source) {
    ExposureSeries series;
    series.band_id = band.id;
    series.unit = settings.unit;
    series.source = source;
    try {
        instr.apply_settings(settings);
        for (int i = 0; i < params.n_samples; ++i) {
            const double t = clock.now_seconds();
            series.samples.push_back({t, instr.query_channel_power(band.f_start, band.f_stop)});
            clock.sleep_seconds(params.int_sample_time_s);
        }
    } catch (const scpi::InstrumentError& e) {
        throw PartialSeries(std::move(series), e.what());
    } catch (const scpi::TransportError& e) {
        throw PartialSeries(std::move(series), e.what());
    }
    return series;
}

double incr_percent(double v2, double v1, double epsilon) { return 100.0 * (v2 - v1) / std::max(v1, epsilon); }

std::vector<std::string> sel_band_use(const SpectrumTrace& span1, const SpectrumTrace& span2, const BandPlan& plan,
                                      double thre_inc_percent, bool per_band_peak) {
    if (!span1.well_formed() || !span2.well_formed() || !span1.same_grid(span2))
        throw GridMismatch("wide-span scans do not share one frequency grid");

    auto epsilon = [&](const Band& b) {
        return to_field(plan.min_level_at(b.f_start, false)).volts_per_meter();
    };

    std::set<std::string> marked;
    if (per_band_peak) {
        std::map<std::string, std::pair<double, double>> peaks;
        for (std::size_t i = 0; i < span1.points.size(); ++i) {
            const Band* b = plan.band_containing(span1.points[i].frequency);
            if (!b) continue;
            auto [it, inserted] = peaks.try_emplace(b->id, 0.0, 0.0);
            it->second.first = std::max(it->second.first, span1.points[i].field.volts_per_meter());
            it->second.second = std::max(it->second.second, span2.points[i].field.volts_per_meter());
        }
        for (const auto& [id, p] : peaks)
            if (incr_percent(p.second, p.first, epsilon(plan.at(id))) > thre_inc_percent) marked.insert(id);
    } else {
        for (std::size_t i = 0; i < span1.points.size(); ++i) {
            const Band* b = plan.band_containing(span1.points[i].frequency);
            if (!b || marked.contains(b->id)) continue;
            const double incr = incr_percent(span2.points[i].field.volts_per_meter(),
                                             span1.points[i].field.volts_per_meter(), epsilon(*b));
            if (incr > thre_inc_percent) marked.insert(b->id);
        }
    }

    std::set<std::string> selected = marked;
    for (const auto& id : marked) {
        const Band& b = plan.at(id);
        if (b.duplex == Duplex::FddUplink && b.paired_band) selected.insert(*b.paired_band);
    }
    std::vector<std::string> out;
    for (const Band* b : plan.sorted_bands())
        if (selected.contains(b->id)) out.push_back(b->id);
    return out;
}

InstrumentSettings p1_adjust_settings(const Band& band) {
    InstrumentSettings s;
    s.unit = MeasureUnit::DbmPerM2;
    s.f_start = band.f_start;
    s.f_stop = band.f_stop;
    s.trace_detector = scpi::TraceDetector::Rms;
    s.type_detector = scpi::TypeDetector::RollingMax;
    s.ref_level = 65.0;
    s.scale_div = 15.0;
    return s;
}

InstrumentSettings p1_nar_settings(const Band& band, const AdjustResult& adjusted, const EngineParams& params) {
    InstrumentSettings s;
    s.unit = MeasureUnit::DbmPerM2;
    s.f_start = band.f_start;
    s.f_stop = band.f_stop;
    s.trace_detector = scpi::TraceDetector::Rms;
    s.type_detector = scpi::TypeDetector::RollingAverage;
    s.avg_samples = params.nar_avg_samples;
    s.preamp = adjusted.preamp;
    s.ref_level = adjusted.ref_level;
    s.scale_div = adjusted.scale_div;
    return s;
}

InstrumentSettings active_nar_settings(const Band& band, const EngineParams& params) {
    InstrumentSettings s;
    s.unit = MeasureUnit::VoltsPerMeter;
    s.f_start = band.f_start;
    s.f_stop = band.f_stop;
    s.trace_detector = scpi::TraceDetector::Rms;
    s.type_detector = scpi::TypeDetector::RollingAverage;
    s.avg_samples = params.nar_avg_samples;
    s.preamp = false;
    s.ref_level = params.ref_level_active.volts_per_meter();
    return s;
}

InstrumentSettings wide_span_settings(const EngineParams& params) {
    InstrumentSettings s;
    s.unit = MeasureUnit::VoltsPerMeter;
    s.f_start = params.wide_span_start;
    s.f_stop = params.wide_span_stop;
    s.trace_detector = scpi::TraceDetector::Rms;
    s.type_detector = scpi::TypeDetector::Max;
    s.preamp = false;
    s.ref_level = params.ref_level_active.volts_per_meter();
    return s;
}

SpectrumTrace wide_span_scan(scpi::Instrument& instr, Clock& clock, const EngineParams& params) {
    instr.apply_settings(wide_span_settings(params));
    instr.reset_trace();
    SpectrumTrace trace;
    const int polls = static_cast<int>(std::ceil(params.max_time_search_s));
    for (int i = 0; i < polls; ++i) {
        trace = instr.query_trace();
        clock.sleep_seconds(1.0);
    }
    return trace;
}

}  // namespace emfa::engine
