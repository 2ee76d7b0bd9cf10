#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include "emfa/analysis/stats.hpp"
#include "emfa/sim/control.hpp"
#include "emfa/traffic/iperf.hpp"
#include "emfa/traffic/simulated_link.hpp"
#include "../support/fixtures.hpp"

using namespace emfa;
using namespace emfa::traffic;
using namespace std::chrono_literals;

namespace {

struct LinkRig {
    explicit LinkRig(sim::LinkCapacity link) {
        sim::Scene s = sim::default_scene();
        s.link = link;
        state = std::make_shared<sim::SceneState>(s);
        backend = std::make_unique<SimulatedLinkBackend>(std::make_shared<sim::LocalSceneControl>(state), clock, 3);
    }
    SimulatedClock clock;
    std::shared_ptr<sim::SceneState> state;
    std::unique_ptr<SimulatedLinkBackend> backend;
};

class BrokenControl final : public sim::SceneControl {
public:
    void set_antenna(sim::EmitterRole) override { throw std::runtime_error("control link down"); }
    void set_traffic(bool, TrafficDirection, double) override { throw std::runtime_error("control link down"); }
    sim::LinkCapacity link_capacity() override { throw std::runtime_error("control link down"); }
};

TrafficSpec ul(std::optional<double> rate, double duration = 120) {
    TrafficSpec s;
    s.target_rate_mbps = rate;
    s.duration_s = duration;
    return s;
}

bool wait_until(const std::function<bool()>& done, std::chrono::milliseconds limit = 5s) {
    const auto deadline = std::chrono::steady_clock::now() + limit;
    while (!done()) {
        if (std::chrono::steady_clock::now() > deadline) return false;
        std::this_thread::sleep_for(10ms);
    }
    return true;
}

std::filesystem::path write_script(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
    const auto p = dir / name;
    std::ofstream(p) << "#!/bin/sh\n" << body;
    std::filesystem::permissions(p, std::filesystem::perms::owner_all);
    return p;
}

}  // namespace

TEST_SUITE("traffic") {

TEST_CASE("spec validation") {
    CHECK_FALSE(TrafficSpec{}.invalid_field().has_value());
    TrafficSpec s;
    s.duration_s = 0;
    CHECK(s.invalid_field() == "duration");
    s = {};
    s.parallel_streams = 0;
    CHECK(s.invalid_field() == "parallel_streams");
    s = {};
    s.target_rate_mbps = -1;
    CHECK(s.invalid_field().has_value());
}

TEST_CASE("UL MAX on a LOS-like link exceeds 45 Mbps") {
    LinkRig rig({60, 250});
    auto session = rig.backend->start(ul(std::nullopt));
    rig.clock.advance(10s);
    const auto samples = session->samples();
    REQUIRE(samples.size() == 10);
    for (const auto& s : samples) {
        CHECK(s.mbps > 45.0);
        CHECK(s.mbps <= 60.0);
    }
    session->stop();
}

TEST_CASE("UL MAX on an NLOS-like link stays below 16 Mbps") {
    LinkRig rig({12, 60});
    auto session = rig.backend->start(ul(std::nullopt));
    rig.clock.advance(10s);
    for (const auto& s : session->samples()) CHECK(s.mbps < 16.0);
}

TEST_CASE("fixed 5 Mbps UL") {
    LinkRig rig({60, 250});
    auto session = rig.backend->start(ul(5.0));
    rig.clock.advance(20s);
    const auto mean = summarize(*session).mean;
    CHECK(std::abs(mean - 5.0) < 0.25);
}

TEST_CASE("samples are spaced by the report interval") {
    LinkRig rig({60, 250});
    auto spec = ul(20.0);
    spec.report_interval_s = 0.5;
    auto session = rig.backend->start(spec);
    rig.clock.advance(5s);
    const auto samples = session->samples();
    REQUIRE(samples.size() == 10);
    for (std::size_t i = 0; i < samples.size(); ++i)
        CHECK(samples[i].timestamp_s == doctest::Approx(0.5 * static_cast<double>(i + 1)));
}

TEST_CASE("scene follows the session") {
    LinkRig rig({60, 250});
    auto session = rig.backend->start(ul(100.0));
    auto scene = rig.state->snapshot();
    CHECK(scene.traffic_active);
    CHECK(scene.traffic_rate_mbps == 60.0);
    rig.clock.advance(3s);
    session->stop();
    CHECK(session->state() == SessionState::Stopped);
    CHECK_FALSE(rig.state->snapshot().traffic_active);
    const auto n = session->samples().size();
    rig.clock.advance(10s);
    CHECK(session->samples().size() == n);
}

TEST_CASE("expiry, and stop after expiry keeps EXPIRED") {
    LinkRig rig({60, 250});
    auto session = rig.backend->start(ul(10.0, 4.5));
    rig.clock.advance(10s);
    CHECK(session->state() == SessionState::Expired);
    CHECK(session->samples().size() == 5);
    CHECK(session->samples().back().timestamp_s == 4.5);
    CHECK_FALSE(rig.state->snapshot().traffic_active);
    session->stop();
    session->stop();
    CHECK(session->state() == SessionState::Expired);
    CHECK(rig.clock.pending_timers() == 0);
}

TEST_CASE("stop twice is a no-op") {
    LinkRig rig({60, 250});
    auto session = rig.backend->start(ul(10.0));
    session->stop();
    session->stop();
    CHECK(session->state() == SessionState::Stopped);
    CHECK(rig.clock.pending_timers() == 0);
}

TEST_CASE("unreachable backend gives a FAILED session") {
    SimulatedClock clock;
    SimulatedLinkBackend backend(std::make_shared<BrokenControl>(), clock);
    auto session = backend.start(ul(10.0));
    CHECK(session->state() == SessionState::Failed);
    CHECK(session->failure().find("control link down") != std::string::npos);
    CHECK_THROWS_AS(backend.start(ul(10.0, -1)), std::invalid_argument);
}

TEST_CASE("dropping a running session cancels nothing it should not") {
    LinkRig rig({60, 250});
    {
        auto session = rig.backend->start(ul(10.0));
    }
    CHECK_NOTHROW(rig.clock.advance(5s));
}

TEST_CASE("summary statistics") {
    LinkRig rig({60, 250});
    auto session = rig.backend->start(ul(30.0));
    rig.clock.advance(15s);
    std::vector<double> v;
    for (const auto& s : session->samples()) v.push_back(s.mbps);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double half = 1.959964 * std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
    const auto ci = summarize(*session);
    CHECK(std::abs(ci.mean - mean) < 1e-9);
    CHECK(std::abs(ci.halfwidth - half) < 1e-9);

    LinkRig flat({60, 250});
    SimulatedLinkBackend exact(std::make_shared<sim::LocalSceneControl>(flat.state), flat.clock, 1, 0.0);
    auto constant = exact.start(ul(10.0));
    flat.clock.advance(5s);
    CHECK(summarize(*constant).mean == 10.0);
    CHECK(summarize(*constant).halfwidth == 0.0);

    auto fresh = exact.start(ul(10.0));
    flat.clock.advance(1s);
    CHECK_THROWS_AS(summarize(*fresh), analysis::InsufficientData);
}

TEST_CASE("iperf interval parsing") {
    auto r = parse_interval_line("[  5]   0.00-1.00   sec  5.62 MBytes  47.1 Mbits/sec");
    REQUIRE(r.has_value());
    CHECK(r->stream == 5);
    CHECK(r->end_s == 1.0);
    CHECK(r->mbps == 47.1);
    r = parse_interval_line("[SUM]   1.00-2.00   sec  11.2 MBytes  94.0 Mbits/sec");
    REQUIRE(r.has_value());
    CHECK_FALSE(r->stream.has_value());
    r = parse_interval_line("[  5]   2.00-3.00   sec   512 KBytes  900 Kbits/sec   0   85.5 KBytes");
    REQUIRE(r.has_value());
    CHECK(r->mbps == doctest::Approx(0.9));
    CHECK_FALSE(parse_interval_line("[  5]   0.00-10.00  sec  56.2 MBytes  47.1 Mbits/sec    0   sender").has_value());
    CHECK_FALSE(parse_interval_line("[  5]   0.00-10.00  sec  56.0 MBytes  47.0 Mbits/sec        receiver").has_value());
    CHECK_FALSE(parse_interval_line("Connecting to host 127.0.0.1, port 5201").has_value());
}

TEST_CASE("iperf arguments") {
    IperfOptions o;
    o.server = {"10.0.0.2", 5202};
    TrafficSpec s;
    s.direction = TrafficDirection::Downlink;
    s.target_rate_mbps = 5;
    s.duration_s = 120;
    const auto args = iperf_arguments(o, s);
    const std::vector<std::string> expected{"iperf3", "-c", "10.0.0.2", "-p", "5202", "-t", "120", "-i", "1",
                                            "-P", "1", "-f", "m", "--forceflush", "-R", "-b", "5M"};
    CHECK(args == expected);
}

TEST_CASE("iperf backend drives a child process") {
    const auto dir = test::temp_dir("iperf");
    SteadyClock clock;
    SUBCASE("interval reports become samples and a clean exit expires") {
        IperfOptions o;
        o.binary = write_script(dir, "ok.sh",
                                "echo 'Connecting to host'\n"
                                "echo '[  5]   0.00-1.00   sec  5.62 MBytes  47.1 Mbits/sec'\n"
                                "echo '[  5]   1.00-2.00   sec  5.50 MBytes  46.1 Mbits/sec'\n"
                                "echo '[  5]   0.00-2.00   sec  11.1 MBytes  46.6 Mbits/sec    sender'\n")
                       .string();
        IperfBackend backend(o, clock);
        auto session = backend.start(TrafficSpec{});
        REQUIRE(wait_until([&] { return session->state() != SessionState::Running; }));
        CHECK(session->state() == SessionState::Expired);
        const auto samples = session->samples();
        REQUIRE(samples.size() == 2);
        CHECK(samples[1].mbps == 46.1);
    }
    SUBCASE("a failing tool reports its last line") {
        IperfOptions o;
        o.binary = write_script(dir, "fail.sh", "echo 'iperf3: error - unable to connect to server'\nexit 1\n").string();
        IperfBackend backend(o, clock);
        auto session = backend.start(TrafficSpec{});
        REQUIRE(wait_until([&] { return session->state() != SessionState::Running; }));
        CHECK(session->state() == SessionState::Failed);
        CHECK(session->failure().find("unable to connect") != std::string::npos);
    }
    SUBCASE("a missing binary fails immediately") {
        IperfOptions o;
        o.binary = (dir / "no-such-tool").string();
        IperfBackend backend(o, clock);
        CHECK(backend.start(TrafficSpec{})->state() == SessionState::Failed);
    }
    SUBCASE("stop terminates the child") {
        IperfOptions o;
        o.binary = write_script(dir, "slow.sh", "exec sleep 30\n").string();
        IperfBackend backend(o, clock);
        auto session = backend.start(TrafficSpec{});
        session->stop();
        CHECK(session->state() == SessionState::Stopped);
        const auto t0 = std::chrono::steady_clock::now();
        session.reset();
        CHECK(std::chrono::steady_clock::now() - t0 < 5s);
    }
    std::filesystem::remove_all(dir);
}

}
