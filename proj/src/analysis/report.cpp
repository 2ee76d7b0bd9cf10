#include "emfa/analysis/report.hpp"

#include <set>
#include <sstream>

#include "emfa/core/io.hpp"

namespace emfa::analysis {

SessionSummary summarize_session(const Session& session, const BandPlan& plan) {
    SessionSummary s;
    s.location_label = session.location_label;
    s.distance_to_rbs_m = session.distance_to_rbs_m;
    s.los = session.los;
    s.direction = session.direction;
    s.selected_bands = session.selected_bands;
    s.breakdown = aggregate_session(session, plan);
    if (s.breakdown.total().watts_per_m2() > 0.0) s.ue_share_pct = ue_share(s.breakdown);
    s.total_field_vpm = total_field(s.breakdown).volts_per_meter();

    std::vector<double> mbps;
    for (const auto& t : session.throughput_log) mbps.push_back(t.mbps);
    if (mbps.size() >= 2) {
        s.throughput_mbps = confidence_interval(mbps);
    } else if (mbps.size() == 1) {
        s.throughput_mbps = Interval{mbps.front(), 0.0};
    }
    if (s.throughput_mbps && s.throughput_mbps->mean > 0.0)
        s.cost_vpm_per_mbps = exposure_per_mbps(FieldStrength{s.total_field_vpm}, s.throughput_mbps->mean);
    return s;
}

CorpusReport analyze_corpus(std::span<const Session> sessions, const BandPlan& plan) {
    CorpusReport r;
    std::vector<Session> kept;
    for (const auto& session : sessions) {
        try {
            r.sessions.push_back(summarize_session(session, plan));
            kept.push_back(session);
        } catch (const std::exception& e) {
            r.warnings.push_back("session '" + session.location_label + "' skipped: " + e.what());
        }
    }
    r.band_occurrence = band_occurrence(kept);

    std::vector<FitPoint> points;
    std::set<double> abscissae;
    for (const auto& s : r.sessions) {
        if (s.direction != TrafficDirection::Uplink || !s.cost_vpm_per_mbps) continue;
        if (!abscissae.insert(s.throughput_mbps->mean).second) continue;
        points.push_back({s.throughput_mbps->mean, *s.cost_vpm_per_mbps});
    }
    if (points.size() < kMinFitSessions) {
        r.fit_note = "insufficient points for the exposure-per-Mbps fit: " + std::to_string(points.size()) +
                     " uplink sessions with throughput, " + std::to_string(kMinFitSessions) + " required";
        return r;
    }
    try {
        r.fit = fit_double_exponential(points);
        r.fit_note = "fitted on " + std::to_string(points.size()) + " uplink sessions";
    } catch (const FitFailed& e) {
        r.fit_note = e.what();
    }
    return r;
}

namespace {

nlohmann::json component_json(const Component& c) {
    return {{"density_wpm2", c.density.watts_per_m2()}, {"ci_halfwidth_wpm2", c.ci_halfwidth_wpm2}};
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json report_to_json(const CorpusReport& report) {
    nlohmann::json doc;
    doc["tool_version"] = kToolVersion;
    auto& sessions = doc["sessions"] = nlohmann::json::array();
    for (const auto& s : report.sessions) {
        nlohmann::json j;
        j["location"] = s.location_label;
        j["distance_to_rbs_m"] = s.distance_to_rbs_m;
        j["los"] = s.los;
        j["direction"] = to_string(s.direction);
        j["breakdown"] = {{"rbs_env", component_json(s.breakdown.rbs_env)},
                          {"ue_active_pre5g", component_json(s.breakdown.ue_active_pre5g)},
                          {"ue_active_5g", component_json(s.breakdown.ue_active_5g)},
                          {"rbs_active", component_json(s.breakdown.rbs_active)},
                          {"total_wpm2", s.breakdown.total().watts_per_m2()}};
        j["ue_share_pct"] = optional_json(s.ue_share_pct);
        if (s.throughput_mbps) {
            j["throughput_mbps"] = {{"mean", s.throughput_mbps->mean}, {"ci_halfwidth", s.throughput_mbps->halfwidth}};
        } else {
            j["throughput_mbps"] = nullptr;
        }
        j["total_field_vpm"] = s.total_field_vpm;
        j["exposure_per_mbps"] = optional_json(s.cost_vpm_per_mbps);
        j["selected_bands"] = s.selected_bands;
        sessions.push_back(std::move(j));
    }
    if (report.fit) {
        const auto& p = report.fit->params;
        doc["fit"] = {{"f1", p.f1},
                      {"e1", p.e1},
                      {"f2", p.f2},
                      {"e2", p.e2},
                      {"residual_norm", report.fit->residual_norm},
                      {"iterations", report.fit->iterations}};
    } else {
        doc["fit"] = nullptr;
    }
    doc["fit_note"] = report.fit_note;
    doc["band_occurrence"] = report.band_occurrence;
    doc["warnings"] = report.warnings;
    return doc;
}

std::string report_csv(const CorpusReport& report) {
    std::ostringstream out;
    out << "location,distance_m,los,throughput_mbps,total_field_vpm,cost_vpm_per_mbps\n";
    for (const auto& s : report.sessions) {
        out << s.location_label << ',' << format_number(s.distance_to_rbs_m) << ',' << (s.los ? "LOS" : "NLOS") << ','
            << (s.throughput_mbps ? format_number(s.throughput_mbps->mean) : "") << ','
            << format_number(s.total_field_vpm) << ','
            << (s.cost_vpm_per_mbps ? format_number(*s.cost_vpm_per_mbps) : "") << '\n';
    }
    return out.str();
}

}  // namespace emfa::analysis
