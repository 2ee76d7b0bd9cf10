#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>

#include "emfa/cli/commands.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

emfa::net::Endpoint endpoint(const std::string& text) { return emfa::net::Endpoint::parse(text); }

}  // namespace

int main(int argc, char** argv) {
    using namespace emfa::cli;

    CLI::App app{"Exposure assessment: spectrum-analyzer automation, simulation and analysis"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Serve a simulated spectrum analyzer for a scene");
    std::string sim_scene, sim_listen = "127.0.0.1:5025", sim_control, sim_transcript;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--scene", sim_scene, "Scene file")->required();
    simulate->add_option("--instrument", sim_listen, "Listen address HOST:PORT");
    simulate->add_option("--control", sim_control, "Control listen address HOST:PORT");
    simulate->add_option("--transcript", sim_transcript, "Transcript log file");
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Noise seed");

    // measure
    auto* measure = app.add_subcommand("measure", "Run a measurement session (M1, P1, M2, P2, M3, P3)");
    std::string m_instrument, m_scene, m_plan, m_params, m_script, m_out = "session.json", m_direction, m_rate,
                               m_control, m_iperf, m_location;
    std::uint64_t m_seed = 0;
    double m_distance = 0.0;
    bool m_los = false, m_nlos = false;
    measure->add_option("--instrument", m_instrument, "Analyzer address HOST:PORT (default from $EMFA_INSTRUMENT)");
    measure->add_option("--scene", m_scene, "Simulate this scene in-process on a virtual clock");
    measure->add_option("--plan", m_plan, "Band plan file");
    measure->add_option("--params", m_params, "Engine parameters file");
    measure->add_option("--script", m_script, "Scenario script (scripted operator)");
    measure->add_option("--out", m_out, "Session output path");
    auto* m_seed_opt = measure->add_option("--seed", m_seed, "Noise and traffic seed");
    measure->add_option("--direction", m_direction, "Traffic direction")->check(CLI::IsMember({"ul", "dl", "UL", "DL"}));
    measure->add_option("--rate", m_rate, "Traffic rate in Mbps or 'max'");
    measure->add_option("--control", m_control, "Simulator control address HOST:PORT");
    measure->add_option("--iperf", m_iperf, "Bulk-transfer server HOST:PORT");
    measure->add_option("--location", m_location, "Location label");
    auto* m_distance_opt = measure->add_option("--distance", m_distance, "Distance to the RBS in meters");
    measure->add_flag("--los", m_los, "Line of sight to the RBS");
    measure->add_flag("--nlos", m_nlos, "No line of sight to the RBS")->excludes("--los");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Breakdowns, shares and the exposure-per-Mbps fit");
    std::vector<std::string> a_sessions;
    std::string a_plan, a_out = "report.json", a_csv;
    analyze->add_option("sessions", a_sessions, "Session files")->required();
    analyze->add_option("--plan", a_plan, "Band plan file");
    analyze->add_option("--out", a_out, "Report output path");
    analyze->add_option("--csv", a_csv, "Per-location CSV output path");

    // export
    auto* exp = app.add_subcommand("export", "Export the exposure series of a session as CSV");
    std::string e_session, e_out;
    exp->add_option("session", e_session, "Session file")->required();
    exp->add_option("--out", e_out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate) {
            SimulateOptions o;
            o.scene = sim_scene;
            o.listen = endpoint(sim_listen);
            if (!sim_control.empty()) o.control = endpoint(sim_control);
            if (!sim_transcript.empty()) o.transcript = sim_transcript;
            if (*sim_seed_opt) o.seed = sim_seed;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            return cmd_simulate(o, g_stop, std::cout, std::cerr);
        }
        if (*measure) {
            MeasureOptions o;
            if (!m_instrument.empty()) o.instrument = endpoint(m_instrument);
            if (!m_scene.empty()) o.scene = m_scene;
            if (!m_plan.empty()) o.plan = m_plan;
            if (!m_params.empty()) o.params = m_params;
            if (!m_script.empty()) o.script = m_script;
            o.out = m_out;
            if (*m_seed_opt) o.seed = m_seed;
            if (!m_direction.empty())
                o.direction = (m_direction == "dl" || m_direction == "DL") ? emfa::TrafficDirection::Downlink
                                                                             : emfa::TrafficDirection::Uplink;
            if (!m_rate.empty()) o.rate = m_rate;
            if (!m_control.empty()) o.control = endpoint(m_control);
            if (!m_iperf.empty()) o.iperf = endpoint(m_iperf);
            if (!m_location.empty()) o.location = m_location;
            if (m_los) o.los = true;
            if (m_nlos) o.los = false;
            if (*m_distance_opt) o.distance_m = m_distance;
            return cmd_measure(o, std::cin, std::cout, std::cerr);
        }
        if (*analyze) {
            AnalyzeOptions o;
            for (const auto& s : a_sessions) o.sessions.emplace_back(s);
            if (!a_plan.empty()) o.plan = a_plan;
            o.out = a_out;
            if (!a_csv.empty()) o.csv = a_csv;
            return cmd_analyze(o, std::cout, std::cerr);
        }
        if (*exp) return cmd_export({e_session, e_out}, std::cout, std::cerr);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
