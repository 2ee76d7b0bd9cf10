#pragma once

#include <memory>
#include <string>
#include <vector>

#include "emfa/core/band.hpp"
#include "emfa/core/clock.hpp"
#include "emfa/core/series.hpp"
#include "emfa/engine/algorithms.hpp"
#include "emfa/engine/operator.hpp"
#include "emfa/engine/params.hpp"
#include "emfa/scpi/client.hpp"
#include "emfa/traffic/traffic.hpp"

namespace emfa::engine {

/// Everything a phase needs. Non-owning.
struct EngineContext {
    scpi::Instrument& instrument;
    Clock& clock;
    const BandPlan& plan;
    const EngineParams& params;
    OperatorPort& op;
};

struct P1Result {
    std::vector<ExposureSeries> series;
    std::vector<AdjustResult> adjustments;  // final state per measured band
    std::vector<PhaseNote> notes;
};

/// Environmental RBS exposure over every downlink-carrying band. A band whose
/// level search is degenerate gets a floor-level series and a note.
P1Result run_p1(EngineContext& ctx);

struct P2Result {
    SpectrumTrace span1;
    SpectrumTrace span2;
    std::vector<std::string> selected;
    std::vector<ExposureSeries> series;
    std::shared_ptr<traffic::TrafficSession> traffic;  // left running for P3
    std::vector<PhaseNote> notes;
};

/// Active-traffic UE exposure. Throws EmptySelection (after stopping the
/// traffic) when no band responds to the injected traffic.
P2Result run_p2(EngineContext& ctx, traffic::TrafficBackend& backend, const traffic::TrafficSpec& spec);

struct P3Result {
    std::vector<ExposureSeries> series;
    std::vector<PhaseNote> notes;
};

/// Active-traffic RBS exposure over the downlink-carrying selected bands,
/// then stops the traffic. Throws StaleTraffic, before any query, when the
/// session is no longer running. A failing band keeps its partial series
/// and the loop continues.
P3Result run_p3(EngineContext& ctx, traffic::TrafficSession& traffic, const std::vector<std::string>& selected);

struct SessionMetadata {
    std::string location_label;
    bool los = true;
    double distance_to_rbs_m = 0.0;
};

struct SessionOutcome {
    Session session;
    bool engine_error = false;     // some phase failed; the session is partial
    bool transport_error = false;  // the instrument link broke
};

/// M1, P1, M2, P2, M3, P3. Failures and declined prompts end the flow early
/// and are recorded as session notes.
SessionOutcome run_session(EngineContext& ctx, traffic::TrafficBackend& backend, const traffic::TrafficSpec& spec,
                           const SessionMetadata& metadata);

}  // namespace emfa::engine
