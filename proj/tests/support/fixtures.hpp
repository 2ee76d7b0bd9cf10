#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "emfa/core/band.hpp"
#include "emfa/core/clock.hpp"
#include "emfa/scpi/client.hpp"
#include "emfa/sim/loopback.hpp"
#include "emfa/sim/scene.hpp"

namespace emfa::test {

/// Channel whose responses come from a callback; records what was sent.
class ScriptedChannel final : public scpi::LineChannel {
public:
    using Responder = std::function<std::string(const std::string&)>;

    explicit ScriptedChannel(Responder responder) : responder_(std::move(responder)) {}

    void send_line(std::string_view line) override {
        sent.emplace_back(line);
        pending_.push_back(responder_(std::string(line)));
    }
    std::string receive_line(std::chrono::milliseconds) override {
        if (pending_.empty()) throw scpi::TransportError("nothing pending");
        auto r = pending_.front();
        pending_.pop_front();
        return r;
    }

    std::vector<std::string> sent;

private:
    Responder responder_;
    std::deque<std::string> pending_;
};

/// An instrument wired to an in-process simulated analyzer.
struct SimRig {
    explicit SimRig(sim::Scene scene)
        : state(std::make_shared<sim::SceneState>(std::move(scene))),
          instrument(std::make_unique<sim::LoopbackChannel>(state), clock) {}

    SimulatedClock clock;
    std::shared_ptr<sim::SceneState> state;
    scpi::Instrument instrument;
};

inline sim::Scene scene_with(std::vector<sim::Emitter> emitters, std::uint64_t seed = 1) {
    sim::Scene s = sim::default_scene();
    s.emitters = std::move(emitters);
    s.rng_seed = seed;
    return s;
}

inline sim::Emitter rbs(std::string band, double dbm, double coupling = 0.0) {
    return {std::move(band), sim::EmitterRole::Rbs, PowerDensityLog{dbm}, coupling, sim::PsdShape::Flat};
}

inline sim::Emitter ue(std::string band, double dbm, double coupling = 1.0) {
    return {std::move(band), sim::EmitterRole::Ue, PowerDensityLog{dbm}, coupling, sim::PsdShape::Flat};
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("emfa_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Root of the source tree, for data files.
inline std::filesystem::path source_dir() { return EMFA_SOURCE_DIR; }

}  // namespace emfa::test
