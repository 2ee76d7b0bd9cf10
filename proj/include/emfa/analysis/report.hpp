#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "emfa/analysis/breakdown.hpp"
#include "emfa/analysis/fit.hpp"
#include "emfa/analysis/stats.hpp"

namespace emfa::analysis {

struct SessionSummary {
    std::string location_label;
    double distance_to_rbs_m = 0.0;
    bool los = false;
    TrafficDirection direction = TrafficDirection::Uplink;
    ExposureBreakdown breakdown;
    std::optional<double> ue_share_pct;
    std::optional<Interval> throughput_mbps;
    double total_field_vpm = 0.0;
    std::optional<double> cost_vpm_per_mbps;
    std::vector<std::string> selected_bands;
};

struct CorpusReport {
    std::vector<SessionSummary> sessions;
    std::optional<FitResult> fit;
    std::string fit_note;
    std::map<std::string, int> band_occurrence;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinFitSessions = 4;

SessionSummary summarize_session(const Session& session, const BandPlan& plan);

/// Sessions failing aggregation are dropped with a warning. The corpus fit
/// uses uplink sessions with positive throughput and runs when at least
/// kMinFitSessions distinct throughputs are available.
CorpusReport analyze_corpus(std::span<const Session> sessions, const BandPlan& plan);

nlohmann::json report_to_json(const CorpusReport& report);

/// location,distance_m,los,throughput_mbps,total_field_vpm,cost_vpm_per_mbps
std::string report_csv(const CorpusReport& report);

}  // namespace emfa::analysis
