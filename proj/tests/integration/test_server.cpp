#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "emfa/core/io.hpp"
#include "emfa/engine/algorithms.hpp"
#include "emfa/engine/phases.hpp"
#include "emfa/sim/control.hpp"
#include "emfa/sim/server.hpp"
#include "../support/fixtures.hpp"

using namespace emfa;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

struct Server {
    explicit Server(sim::Scene scene, sim::ServerOptions options = {})
        : state(std::make_shared<sim::SceneState>(std::move(scene))), server(state, clock, std::move(options)) {
        server.start();
    }
    SimulatedClock clock;
    std::shared_ptr<sim::SceneState> state;
    sim::SanServer server;
};

std::string ask(net::TcpStream& s, const std::string& line) {
    s.write_line(line);
    return s.read_line(2000ms).value_or("<eof>");
}

/// One-band plan for B3-DL with its noise floor row.
sim::Scene one_band_scene() {
    sim::Scene scene = test::scene_with({test::rbs("B3-DL", -45)}, 5);
    BandPlan one;
    one.operator_name = "X";
    one.bands = {scene.plan.at("B3-DL")};
    one.bands[0].paired_band.reset();
    one.bands[0].duplex = Duplex::Tdd;
    one.noise_floor.rows = {*scene.plan.noise_floor.find("B3-DL")};
    scene.plan = one;
    return scene;
}

}  // namespace

TEST_SUITE("integration") {

TEST_CASE("server answers identification and keeps the line open after a malformed command") {
    Server s(sim::default_scene());
    auto c = net::TcpStream::connect(s.server.endpoint(), 2000ms);
    CHECK(ask(c, "*IDN?") == "EMFA,SAN-SIM,0,1.0");
    CHECK(ask(c, "FOO:BAR 1") == "ERR 100");
    CHECK(ask(c, "UNIT:POW VPM") == "OK");
    CHECK(ask(c, "DISP:Y:RLEV 6200") == "ERR 102");
    CHECK(ask(c, "*IDN?") == "EMFA,SAN-SIM,0,1.0");
}

TEST_CASE("a second client is refused while one is connected") {
    Server s(sim::default_scene());
    auto first = net::TcpStream::connect(s.server.endpoint(), 2000ms);
    CHECK(ask(first, "*IDN?").starts_with("EMFA"));
    bool refused = false;
    try {
        auto second = net::TcpStream::connect(s.server.endpoint(), 500ms);
        second.write_line("*IDN?");
        refused = !second.read_line(500ms).has_value();
    } catch (const net::NetError&) {
        refused = true;
    }
    CHECK(refused);
    first.shutdown();
    first = net::TcpStream{};
    std::optional<std::string> reply;
    for (int attempt = 0; attempt < 40 && !reply; ++attempt) {
        try {
            auto again = net::TcpStream::connect(s.server.endpoint(), 500ms);
            again.write_line("*IDN?");
            reply = again.read_line(500ms);
        } catch (const net::NetError&) {
            std::this_thread::sleep_for(50ms);
        }
    }
    CHECK(reply == std::optional<std::string>("EMFA,SAN-SIM,0,1.0"));
    CHECK(s.server.clients_served() == 2);
}

TEST_CASE("binding a port already in use fails at startup") {
    Server s(sim::default_scene());
    auto state = std::make_shared<sim::SceneState>(sim::default_scene());
    SimulatedClock clock;
    sim::SanServer clash(state, clock, {s.server.endpoint(), std::nullopt, std::nullopt});
    CHECK_THROWS_AS(clash.start(), sim::StartupError);
}

TEST_CASE("control port drives the scene remotely") {
    Server s(sim::default_scene(), {{"127.0.0.1", 0}, net::Endpoint{"127.0.0.1", 0}, std::nullopt});
    REQUIRE(s.server.control_port() != 0);
    sim::RemoteSceneControl remote({"127.0.0.1", s.server.control_port()});
    remote.set_antenna(sim::EmitterRole::Ue);
    remote.set_traffic(true, TrafficDirection::Uplink, 12.5);
    const auto snap = s.state->snapshot();
    CHECK(snap.antenna_target == sim::EmitterRole::Ue);
    CHECK(snap.traffic_active);
    CHECK(snap.traffic_rate_mbps == 12.5);
    const auto link = remote.link_capacity();
    CHECK(link.ul_mbps == snap.link.ul_mbps);
    remote.set_traffic(false, TrafficDirection::Uplink, 0);
    CHECK_FALSE(s.state->snapshot().traffic_active);

    auto raw = net::TcpStream::connect({"127.0.0.1", s.server.control_port()}, 2000ms);
    CHECK(ask(raw, "STATE?") == "UE,0,UL,0");
    CHECK(ask(raw, "JUMP") == "ERR 100");
}

TEST_CASE("the server logs every exchanged line") {
    const auto dir = test::temp_dir("server_log");
    {
        Server s(sim::default_scene(), {{"127.0.0.1", 0}, std::nullopt, dir / "log.txt"});
        auto c = net::TcpStream::connect(s.server.endpoint(), 2000ms);
        ask(c, "*IDN?");
        ask(c, "BOGUS");
    }
    CHECK(read_text_file(dir / "log.txt") == "0 < *IDN?\n0 > EMFA,SAN-SIM,0,1.0\n0 < BOGUS\n0 > ERR 100\n");
    fs::remove_all(dir);
}

TEST_CASE("client over TCP matches the loopback result") {
    Server s(one_band_scene());
    auto tcp = scpi::Instrument::connect(s.server.endpoint(), s.clock);
    test::SimRig loop(one_band_scene());
    const Band b = s.state->snapshot().plan.bands.front();
    for (auto* inst : {&tcp, &loop.instrument}) {
        inst->apply_settings(engine::p1_adjust_settings(b));
        inst->reset_trace();
    }
    CHECK(tcp.query_max_level(b.f_start, b.f_stop) == loop.instrument.query_max_level(b.f_start, b.f_stop));
    CHECK(tcp.query_channel_power(b.f_start, b.f_stop) == loop.instrument.query_channel_power(b.f_start, b.f_stop));
}

TEST_CASE("P1 over one band reproduces the golden transcript") {
    Server s(one_band_scene());
    auto inst = scpi::Instrument::connect(s.server.endpoint(), s.clock);
    const BandPlan plan = s.state->snapshot().plan;
    const engine::EngineParams params;
    engine::ScriptedOperator op;
    engine::EngineContext ctx{inst, s.clock, plan, params, op};
    const auto p1 = engine::run_p1(ctx);
    REQUIRE(p1.series.size() == 1);
    const std::string text = inst.transcript().to_text();
    const fs::path golden = test::source_dir() / "tests/data/golden/p1_one_band.txt";
    if (std::getenv("EMFA_UPDATE_GOLDEN")) write_file_atomic(golden, text);
    CHECK(text == read_text_file(golden));
}

}
