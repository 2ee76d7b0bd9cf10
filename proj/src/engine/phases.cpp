#include "emfa/engine/phases.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "emfa/analysis/stats.hpp"
#include "emfa/core/io.hpp"

namespace emfa::engine {

namespace {

std::string series_line(const ExposureSeries& s) {
    const auto v = s.values();
    std::ostringstream out;
    out << std::setprecision(4);
    out << "  " << s.band_id << ": " << v.size() << " samples";
    if (v.size() >= 2) {
        const auto ci = analysis::confidence_interval(v);
        out << ", mean " << ci.mean << " +- " << ci.halfwidth << ' ' << to_string(s.unit);
    } else if (v.size() == 1) {
        out << ", value " << v.front() << ' ' << to_string(s.unit);
    }
    return out.str();
}

}  // namespace

P1Result run_p1(EngineContext& ctx) {
    P1Result result;
    for (const Band* band : ctx.plan.sorted_bands()) {
        if (!band->carries_downlink()) continue;
        try {
            scpi::InstrumentSettings settings = p1_adjust_settings(*band);
            const double floor_off = ctx.plan.min_level(band->id, false).dbm_per_m2();
            AdjustResult adjusted;
            for (int i = 0; i < ctx.params.adjust_iterations; ++i) {
                adjusted = adjust_ref_level_scale_div(ctx.instrument, ctx.clock, settings, *band, ctx.params, false,
                                                      floor_off);
                settings.ref_level = adjusted.ref_level;
                settings.scale_div = adjusted.scale_div;
            }
            adjusted = preamp_management(ctx.instrument, ctx.clock, settings, *band, ctx.plan, ctx.params, adjusted);
            result.adjustments.push_back(adjusted);
            result.series.push_back(nar_band_meas(ctx.instrument, ctx.clock, p1_nar_settings(*band, adjusted, ctx.params),
                                                  *band, ctx.params, ExposureSource::RbsEnvironmental));
        } catch (const DegenerateSignal& e) {
            ExposureSeries floor{band->id, MeasureUnit::DbmPerM2, ExposureSource::RbsEnvironmental, {}};
            const double level = ctx.plan.min_level(band->id, false).dbm_per_m2();
            for (int i = 0; i < ctx.params.n_samples; ++i)
                floor.samples.push_back({ctx.clock.now_seconds(), level});
            result.series.push_back(std::move(floor));
            result.notes.push_back({"P1", std::string(e.what()) + "; recorded at the noise floor"});
        } catch (const PartialSeries& e) {
            result.series.push_back(e.partial());
            result.notes.push_back({"P1", e.what()});
        }
    }
    return result;
}

P2Result run_p2(EngineContext& ctx, traffic::TrafficBackend& backend, const traffic::TrafficSpec& spec) {
    P2Result result;
    result.span1 = wide_span_scan(ctx.instrument, ctx.clock, ctx.params);
    traffic::TrafficSpec active = spec;
    active.duration_s = ctx.params.iperf_duration_s;
    result.traffic = backend.start(active);
    if (result.traffic->state() == traffic::SessionState::Failed)
        result.notes.push_back({"P2", "traffic failed to start: " + result.traffic->failure()});
    try {
        result.span2 = wide_span_scan(ctx.instrument, ctx.clock, ctx.params);
        result.selected = sel_band_use(result.span1, result.span2, ctx.plan, ctx.params.thre_inc_percent,
                                       ctx.params.per_band_peak);
        if (result.selected.empty()) throw EmptySelection();
        for (const auto& id : result.selected) {
            const Band& band = ctx.plan.at(id);
            if (!band.carries_uplink()) continue;
            try {
                result.series.push_back(nar_band_meas(ctx.instrument, ctx.clock,
                                                      active_nar_settings(band, ctx.params), band, ctx.params,
                                                      ExposureSource::UeActive));
            } catch (const PartialSeries& e) {
                result.series.push_back(e.partial());
                result.notes.push_back({"P2", e.what()});
            }
        }
    } catch (...) {
        result.traffic->stop();
        throw;
    }
    return result;
}

P3Result run_p3(EngineContext& ctx, traffic::TrafficSession& traffic, const std::vector<std::string>& selected) {
    if (traffic.state() != traffic::SessionState::Running) {
        const auto state = traffic.state();
        traffic.stop();
        throw StaleTraffic("traffic session is " + std::string(traffic::to_string(state)) +
                           " before the active RBS measurement");
    }
    P3Result result;
    for (const auto& id : selected) {
        const Band& band = ctx.plan.at(id);
        if (!band.carries_downlink()) continue;
        try {
            result.series.push_back(nar_band_meas(ctx.instrument, ctx.clock, active_nar_settings(band, ctx.params),
                                                  band, ctx.params, ExposureSource::RbsActive));
        } catch (const PartialSeries& e) {
            result.series.push_back(e.partial());
            result.notes.push_back({"P3", e.what()});
        } catch (const scpi::InstrumentError& e) {
            result.notes.push_back({"P3", band.id + ": " + e.what()});
        }
    }
    traffic.stop();
    return result;
}

SessionOutcome run_session(EngineContext& ctx, traffic::TrafficBackend& backend, const traffic::TrafficSpec& spec,
                           const SessionMetadata& metadata) {
    SessionOutcome out;
    Session& s = out.session;
    s.location_label = metadata.location_label;
    s.los = metadata.los;
    s.distance_to_rbs_m = metadata.distance_to_rbs_m;
    s.direction = spec.direction;

    auto append = [&s](std::vector<PhaseNote>& notes) {
        s.notes.insert(s.notes.end(), notes.begin(), notes.end());
    };
    auto fail = [&](std::string_view phase, const std::exception& e) {
        s.notes.push_back({std::string(phase), e.what()});
        ctx.op.report(std::string(phase) + " failed: " + e.what());
        out.engine_error = true;
    };
    auto confirm = [&](Step step) {
        if (ctx.op.confirm(step, prompt_text(step))) return true;
        s.notes.push_back({std::string(to_string(step)), "operator declined"});
        return false;
    };
    auto report_series = [&](std::string_view phase, const std::vector<ExposureSeries>& series) {
        ctx.op.report(std::string(phase) + ": " + std::to_string(series.size()) + " series");
        for (const auto& x : series) ctx.op.report(series_line(x));
    };

    std::shared_ptr<traffic::TrafficSession> traffic;
    try {
        if (!confirm(Step::M1)) return out;
        P1Result p1 = run_p1(ctx);
        s.phase1 = std::move(p1.series);
        append(p1.notes);
        report_series("P1", s.phase1);

        if (!confirm(Step::M2)) return out;
        try {
            P2Result p2 = run_p2(ctx, backend, spec);
            s.selected_bands = p2.selected;
            s.phase2 = std::move(p2.series);
            traffic = p2.traffic;
            append(p2.notes);
            if (!p2.notes.empty()) out.engine_error = true;
            std::string bands;
            for (const auto& id : s.selected_bands) bands += (bands.empty() ? "" : " ") + id;
            ctx.op.report("P2: selected " + bands);
            report_series("P2", s.phase2);
        } catch (const EngineError& e) {
            fail("P2", e);
            return out;
        } catch (const scpi::InstrumentError& e) {
            fail("P2", e);
            return out;
        }

        if (!confirm(Step::M3)) {
            traffic->stop();
            s.throughput_log = traffic->samples();
            return out;
        }
        try {
            P3Result p3 = run_p3(ctx, *traffic, s.selected_bands);
            s.phase3 = std::move(p3.series);
            append(p3.notes);
            report_series("P3", s.phase3);
            if (!p3.notes.empty()) out.engine_error = true;
        } catch (const EngineError& e) {
            fail("P3", e);
        }
        s.throughput_log = traffic->samples();
        if (s.throughput_log.size() >= 2) {
            const auto ci = traffic::summarize(*traffic);
            std::ostringstream line;
            line << std::setprecision(4) << "throughput: " << ci.mean << " +- " << ci.halfwidth << " Mbps";
            ctx.op.report(line.str());
        }
    } catch (const scpi::TransportError& e) {
        fail("session", e);
        out.transport_error = true;
    } catch (const scpi::InstrumentError& e) {
        fail("session", e);
    } catch (const std::invalid_argument& e) {
        fail("session", e);
    }
    if (traffic) {
        traffic->stop();
        if (s.throughput_log.empty()) s.throughput_log = traffic->samples();
    }
    return out;
}

}  // namespace emfa::engine
