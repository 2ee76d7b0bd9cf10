#include "emfa/traffic/simulated_link.hpp"

#include <algorithm>
#include <cmath>

#include "emfa/sim/scene.hpp"

namespace emfa::traffic {

namespace {

class SimulatedLinkSession final : public TrafficSession, public std::enable_shared_from_this<SimulatedLinkSession> {
public:
    SimulatedLinkSession(const TrafficSpec& spec, std::shared_ptr<sim::SceneControl> scene, Clock& clock,
                         std::uint64_t seed, double jitter_fraction)
        : TrafficSession(spec), scene_(std::move(scene)), clock_(&clock), noise_(seed),
          jitter_fraction_(jitter_fraction) {}

    void begin() {
        try {
            const sim::LinkCapacity link = scene_->link_capacity();
            const double capacity = spec().direction == TrafficDirection::Uplink ? link.ul_mbps : link.dl_mbps;
            realized_ = std::min(spec().target_rate_mbps.value_or(capacity), capacity);
            scene_->set_traffic(true, spec().direction, realized_);
        } catch (const std::exception& e) {
            finish(SessionState::Failed, e.what());
            return;
        }
        start_ = clock_->now();
        std::lock_guard lock(timer_mu_);
        schedule(1);
    }

private:
    // Caller holds timer_mu_.
    void schedule(int k) {
        const auto end = start_ + seconds_to_duration(spec().duration_s);
        const auto due = std::min(start_ + seconds_to_duration(spec().report_interval_s * k), end);
        std::weak_ptr<SimulatedLinkSession> self = weak_from_this();
        timer_ = clock_->call_at(due, [self, k] {
            if (auto s = self.lock()) s->tick(k);
        });
    }

    void tick(int k) {
        bool expired = false;
        {
            std::lock_guard lock(timer_mu_);
            timer_.reset();
            if (state() != SessionState::Running) return;
            const double jitter = jitter_fraction_ * std::min(std::abs(noise_.gaussian()), 3.0);
            add_sample({clock_->now_seconds(), realized_ * (1.0 - jitter)});
            if (clock_->now() >= start_ + seconds_to_duration(spec().duration_s)) {
                expired = finish(SessionState::Expired);
            } else {
                schedule(k + 1);
            }
        }
        if (expired) clear_scene();
    }

    void on_stop() override {
        {
            std::lock_guard lock(timer_mu_);
            if (timer_) clock_->cancel(*timer_);
            timer_.reset();
        }
        clear_scene();
    }

    void clear_scene() {
        try {
            scene_->set_traffic(false, spec().direction, 0.0);
        } catch (const std::exception&) {
            // The scene is gone; nothing left to clear.
        }
    }

    std::shared_ptr<sim::SceneControl> scene_;
    Clock* clock_;
    sim::NoiseSource noise_;
    double jitter_fraction_;
    double realized_ = 0.0;
    Clock::TimePoint start_{};
    std::mutex timer_mu_;
    std::optional<Clock::TimerId> timer_;
};

}  // namespace

SimulatedLinkBackend::SimulatedLinkBackend(std::shared_ptr<sim::SceneControl> scene, Clock& clock, std::uint64_t seed,
                                           double jitter_fraction)
    : scene_(std::move(scene)), clock_(&clock), seed_(seed), jitter_fraction_(jitter_fraction) {}

std::shared_ptr<TrafficSession> SimulatedLinkBackend::start(const TrafficSpec& spec) {
    if (auto bad = spec.invalid_field()) throw std::invalid_argument("invalid traffic spec field: " + *bad);
    auto session = std::make_shared<SimulatedLinkSession>(spec, scene_, *clock_, seed_ + sessions_started_++,
                                                          jitter_fraction_);
    session->begin();
    return session;
}

}  // namespace emfa::traffic
