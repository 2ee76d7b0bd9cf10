#pragma once

#include <cstdint>
#include <memory>

#include "emfa/core/clock.hpp"
#include "emfa/sim/control.hpp"
#include "emfa/traffic/traffic.hpp"

namespace emfa::traffic {

/// Transfers over the simulator's link. The realized rate is the target
/// clamped to the link capacity of the direction; reported samples carry a
/// small seeded downward jitter. While running, the scene sees the traffic
/// at the realized rate.
class SimulatedLinkBackend final : public TrafficBackend {
public:
    SimulatedLinkBackend(std::shared_ptr<sim::SceneControl> scene, Clock& clock, std::uint64_t seed = 1,
                         double jitter_fraction = 0.02);

    std::shared_ptr<TrafficSession> start(const TrafficSpec& spec) override;

private:
    std::shared_ptr<sim::SceneControl> scene_;
    Clock* clock_;
    std::uint64_t seed_;
    double jitter_fraction_;
    std::uint64_t sessions_started_ = 0;
};

}  // namespace emfa::traffic
