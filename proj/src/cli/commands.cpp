#include "emfa/cli/commands.hpp"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "emfa/analysis/report.hpp"
#include "emfa/cli/script.hpp"
#include "emfa/core/io.hpp"
#include "emfa/engine/phases.hpp"
#include "emfa/sim/control.hpp"
#include "emfa/sim/scene_io.hpp"
#include "emfa/sim/server.hpp"
#include "emfa/traffic/iperf.hpp"
#include "emfa/traffic/simulated_link.hpp"

namespace emfa::cli {

namespace {

/// Scripted or interactive operator. With a scene control at hand, scripted
/// prompt actions drive the scene; interactive confirmations point the
/// simulated antenna the way the prompt asked.
class CliOperator final : public engine::OperatorPort {
public:
    CliOperator(const ScenarioScript* script, sim::SceneControl* control, std::istream& in, std::ostream& out)
        : script_(script), control_(control), in_(&in), out_(&out), stream_(in, out) {}

    bool confirm(engine::Step step, std::string_view prompt) override {
        if (!script_) {
            const bool ok = stream_.confirm(step, prompt);
            if (ok && control_) control_->set_antenna(step == engine::Step::M2 ? sim::EmitterRole::Ue : sim::EmitterRole::Rbs);
            return ok;
        }
        *out_ << prompt << '\n';
        bool answered = false;
        bool ok = false;
        for (const auto& a : script_->actions) {
            if (a.on_prompt != step) continue;
            if (a.kind == ActionKind::Confirm || a.kind == ActionKind::Decline) {
                answered = true;
                ok = a.kind == ActionKind::Confirm;
                break;
            }
            apply(a);
        }
        *out_ << (ok ? "ok" : "declined") << (answered ? "" : " (no scripted answer)") << '\n';
        return ok;
    }

    void report(std::string_view line) override { *out_ << line << '\n'; }

    void apply(const ScriptAction& a) {
        if (!control_) throw ConfigError("actions", "scene actions need a simulator control channel");
        switch (a.kind) {
            case ActionKind::Antenna: control_->set_antenna(a.antenna); break;
            case ActionKind::Traffic:
                control_->set_traffic(a.traffic_on, a.traffic_direction, a.traffic_rate_mbps);
                break;
            default: break;
        }
    }

private:
    const ScenarioScript* script_;
    sim::SceneControl* control_;
    std::istream* in_;
    std::ostream* out_;
    engine::StreamOperator stream_;
};

std::optional<double> parse_rate(const std::string& text) {
    if (text == "max" || text == "MAX") return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0))
        throw ConfigError("--rate", "expected 'max' or a positive number of Mbps");
    return v;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
    return s;
}

}  // namespace

std::filesystem::path transcript_path_for(const std::filesystem::path& session_path) {
    auto p = session_path;
    p += ".scpi.txt";
    return p;
}

int cmd_simulate(const SimulateOptions& options, const std::atomic<bool>& stop, std::ostream& out,
                 std::ostream& err) {
    sim::Scene scene;
    try {
        scene = sim::load_scene(options.scene);
    } catch (const ConfigError& e) {
        err << "scene " << options.scene.string() << ": " << e.what() << '\n';
        return kExitConfig;
    }
    if (options.seed) scene.rng_seed = *options.seed;

    SteadyClock clock;
    auto state = std::make_shared<sim::SceneState>(std::move(scene));
    sim::SanServer server(state, clock, {options.listen, options.control, options.transcript});
    try {
        server.start();
    } catch (const sim::StartupError& e) {
        err << "cannot start simulator: " << e.what() << '\n';
        return kExitTransport;
    }
    out << "instrument listening on " << server.endpoint().to_string() << '\n';
    if (options.control) out << "control listening on " << options.listen.host << ':' << server.control_port() << '\n';
    out.flush();
    while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    out << "served " << server.clients_served() << " clients\n";
    return kExitOk;
}

int cmd_measure(const MeasureOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
    std::optional<ScenarioScript> script;
    std::optional<sim::Scene> scene;
    BandPlan plan = w3_band_plan();
    engine::EngineParams params;
    traffic::TrafficSpec spec;
    engine::SessionMetadata meta;
    std::optional<net::Endpoint> instrument_address = options.instrument;

    try {
        if (options.script) script = load_script(*options.script);
        const auto scene_path = options.scene ? options.scene : (script ? script->scene_file : std::nullopt);
        if (scene_path) {
            scene = sim::load_scene(*scene_path);
            plan = scene->plan;
        }
        if (options.plan) plan = load_band_plan(*options.plan);
        if (auto v = validate_band_plan(plan); !v.empty())
            throw ConfigError("plan", "band " + v.front().band_id + ": " + v.front().rule);
        if (options.params) params = engine::load_params(*options.params);
        if (!scene && !instrument_address) {
            if (const char* env = std::getenv(kInstrumentEnv)) {
                try {
                    instrument_address = net::Endpoint::parse(env);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(kInstrumentEnv, e.what());
                }
            }
        }
        if (!scene && !instrument_address)
            throw ConfigError("--instrument", "no instrument address, scene or " + std::string(kInstrumentEnv));

        spec.direction = options.direction.value_or(script && script->direction ? *script->direction
                                                                                : TrafficDirection::Uplink);
        if (options.rate) {
            spec.target_rate_mbps = parse_rate(*options.rate);
        } else if (script && script->rate_mbps) {
            spec.target_rate_mbps = script->rate_mbps;
        }
        spec.duration_s = params.iperf_duration_s;

        meta.location_label = options.location.value_or(script ? script->location_label : "unnamed");
        meta.los = options.los.value_or(script ? script->los : true);
        meta.distance_to_rbs_m = options.distance_m.value_or(script ? script->distance_to_rbs_m : 0.0);
        if (options.seed && scene) scene->rng_seed = *options.seed;
        if (script && !scene && !options.control) {
            for (const auto& a : script->actions)
                if (a.kind == ActionKind::Antenna || a.kind == ActionKind::Traffic)
                    throw ConfigError("--control", "scripted scene actions need a scene or a simulator control address");
        }
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    const std::uint64_t seed = options.seed.value_or(scene ? scene->rng_seed : 1);

    // Clock and transport: virtual and in-process for a scene, real otherwise.
    std::unique_ptr<Clock> clock;
    std::shared_ptr<sim::SceneState> state;
    std::unique_ptr<sim::SanServer> server;
    std::shared_ptr<sim::SceneControl> control;
    if (scene) {
        clock = std::make_unique<SimulatedClock>();
        state = std::make_shared<sim::SceneState>(*scene);
        server = std::make_unique<sim::SanServer>(state, *clock, sim::ServerOptions{});
        try {
            server->start();
        } catch (const sim::StartupError& e) {
            err << "cannot start in-process simulator: " << e.what() << '\n';
            return kExitTransport;
        }
        instrument_address = server->endpoint();
        control = std::make_shared<sim::LocalSceneControl>(state);
    } else {
        clock = std::make_unique<SteadyClock>();
    }

    std::optional<scpi::Instrument> instrument;
    try {
        instrument.emplace(scpi::Instrument::connect(*instrument_address, *clock));
        if (!control && options.control) control = std::make_shared<sim::RemoteSceneControl>(*options.control);
    } catch (const scpi::TransportError& e) {
        err << "transport error: " << e.what() << '\n';
        return kExitTransport;
    } catch (const net::NetError& e) {
        err << "transport error: " << e.what() << '\n';
        return kExitTransport;
    }

    std::unique_ptr<traffic::TrafficBackend> backend;
    if (control) {
        backend = std::make_unique<traffic::SimulatedLinkBackend>(control, *clock, seed);
    } else {
        traffic::IperfOptions iperf;
        if (options.iperf) iperf.server = *options.iperf;
        backend = std::make_unique<traffic::IperfBackend>(iperf, *clock);
    }

    CliOperator op(script ? &*script : nullptr, control.get(), in, out);
    engine::SessionOutcome outcome;
    try {
        if (script) {
            for (const auto& a : script->actions) {
                if (!a.at_s) continue;
                clock->call_at(seconds_to_duration(*a.at_s), [&op, &err, a] {
                    try {
                        op.apply(a);
                    } catch (const std::exception& e) {
                        err << "scripted action at " << format_number(*a.at_s) << " s failed: " << e.what() << '\n';
                    }
                });
            }
        }
        out << "instrument: " << instrument->identify() << '\n';
        engine::EngineContext ctx{*instrument, *clock, plan, params, op};
        outcome = engine::run_session(ctx, *backend, spec, meta);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const scpi::TransportError& e) {
        err << "transport error: " << e.what() << '\n';
        return kExitTransport;
    }

    try {
        write_file_atomic(options.out, serialize_session(outcome.session));
        write_file_atomic(transcript_path_for(options.out), instrument->transcript().to_text());
    } catch (const std::exception& e) {
        err << "cannot write session: " << e.what() << '\n';
        return kExitConfig;
    }
    out << "session written to " << options.out.string() << '\n';
    if (!outcome.session.selected_bands.empty()) out << "selected bands: " << join(outcome.session.selected_bands) << '\n';
    for (const auto& n : outcome.session.notes) err << "note [" << n.phase << "]: " << n.message << '\n';

    if (outcome.transport_error) return kExitTransport;
    if (script) {
        const auto mismatches = check_expectations(script->expect, outcome.session);
        for (const auto& m : mismatches) err << "expectation failed: " << m << '\n';
        if (!mismatches.empty()) return kExitEngine;
    }
    return outcome.engine_error ? kExitEngine : kExitOk;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
    BandPlan plan = w3_band_plan();
    std::vector<Session> sessions;
    try {
        if (options.plan) plan = load_band_plan(*options.plan);
        if (options.sessions.empty()) throw ConfigError("sessions", "at least one session file is required");
        for (const auto& path : options.sessions) {
            try {
                sessions.push_back(load_session(path));
            } catch (const SchemaVersionError&) {
                throw;
            } catch (const ConfigError& e) {
                err << "warning: skipping " << path.string() << ": " << e.what() << '\n';
            }
        }
    } catch (const SchemaVersionError& e) {
        err << "schema version error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (sessions.empty()) {
        err << "no readable session files\n";
        return kExitAnalysis;
    }

    const analysis::CorpusReport report = analysis::analyze_corpus(sessions, plan);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (report.sessions.empty()) {
        err << "no session could be analyzed\n";
        return kExitAnalysis;
    }
    try {
        write_file_atomic(options.out, analysis::report_to_json(report).dump(2) + "\n");
        if (options.csv) write_file_atomic(*options.csv, analysis::report_csv(report));
    } catch (const std::exception& e) {
        err << "cannot write report: " << e.what() << '\n';
        return kExitConfig;
    }

    for (const auto& s : report.sessions) {
        out << s.location_label << ": total " << format_number(s.total_field_vpm) << " V/m";
        if (s.ue_share_pct) out << ", UE share " << format_number(*s.ue_share_pct) << " %";
        if (s.cost_vpm_per_mbps) out << ", " << format_number(*s.cost_vpm_per_mbps) << " V/m/Mbps";
        out << '\n';
    }
    if (report.fit) {
        const auto& p = report.fit->params;
        out << "fit: F1=" << format_number(p.f1) << " E1=" << format_number(p.e1) << " F2=" << format_number(p.f2)
            << " E2=" << format_number(p.e2) << " residual=" << format_number(report.fit->residual_norm) << '\n';
    } else {
        out << report.fit_note << '\n';
    }
    out << "report written to " << options.out.string() << '\n';
    return kExitOk;
}

int cmd_export(const ExportOptions& options, std::ostream& out, std::ostream& err) {
    Session session;
    try {
        session = load_session(options.session);
    } catch (const ConfigError& e) {
        err << "cannot read session: " << e.what() << '\n';
        return kExitConfig;
    }
    std::vector<ExposureSeries> all = session.phase1;
    all.insert(all.end(), session.phase2.begin(), session.phase2.end());
    all.insert(all.end(), session.phase3.begin(), session.phase3.end());
    try {
        write_file_atomic(options.out, exposure_series_csv(all));
    } catch (const std::exception& e) {
        err << "cannot write export: " << e.what() << '\n';
        return kExitConfig;
    }
    out << all.size() << " series exported to " << options.out.string() << '\n';
    return kExitOk;
}

}  // namespace emfa::cli
