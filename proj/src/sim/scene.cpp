#include "emfa/sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace emfa::sim {

std::string_view to_string(EmitterRole r) { return r == EmitterRole::Rbs ? "RBS" : "UE"; }

std::optional<EmitterRole> parse_role(std::string_view s) {
    if (s == "RBS") return EmitterRole::Rbs;
    if (s == "UE") return EmitterRole::Ue;
    return std::nullopt;
}

std::vector<std::string> Scene::violations() const {
    std::vector<std::string> out;
    if (!(front_to_back_db > 0.0)) out.push_back("front_to_back_db: must be positive");
    if (!(noise_sigma_db >= 0.0)) out.push_back("noise_sigma_db: must be non-negative");
    if (!(preamp_noise_factor > 0.0)) out.push_back("preamp_noise_factor: must be positive");
    if (!(ack_fraction >= 0.0 && ack_fraction <= 1.0)) out.push_back("ack_fraction: must be in [0, 1]");
    if (!(link.ul_mbps > 0.0) || !(link.dl_mbps > 0.0)) out.push_back("link: capacities must be positive");
    if (default_sweep_points < 2) out.push_back("sweep_points: must be at least 2");
    if (traffic_rate_mbps < 0.0) out.push_back("traffic_rate_mbps: must be non-negative");
    for (const auto& v : validate_band_plan(plan)) out.push_back("plan: " + v.band_id + ": " + v.rule);
    for (std::size_t i = 0; i < emitters.size(); ++i) {
        const auto& e = emitters[i];
        const std::string p = "emitters[" + std::to_string(i) + "]";
        if (!plan.find(e.band_id)) out.push_back(p + ".band_id: unknown band '" + e.band_id + "'");
        if (!(e.traffic_coupling >= 0.0 && e.traffic_coupling <= 1.0))
            out.push_back(p + ".traffic_coupling: must be in [0, 1]");
        if (e.role == EmitterRole::Rbs && !(e.traffic_coupling < 1.0))
            out.push_back(p + ".traffic_coupling: RBS emitters keep an always-on pilot share (< 1)");
    }
    return out;
}

Scene default_scene() {
    Scene s;
    s.plan = w3_band_plan();
    return s;
}

double activity(const Scene& scene, EmitterRole role) {
    if (!scene.traffic_active) return 0.0;
    const double rate = std::max(0.0, scene.traffic_rate_mbps);
    const double ul = std::min(1.0, rate / scene.link.ul_mbps);
    const double dl = std::min(1.0, rate / scene.link.dl_mbps);
    const bool uplink = scene.traffic_direction == TrafficDirection::Uplink;
    if (role == EmitterRole::Ue) return uplink ? ul : scene.ack_fraction * dl;
    return uplink ? scene.ack_fraction * ul : dl;
}

PowerDensity visible_density(const Scene& scene, const Emitter& e) {
    const double share = (1.0 - e.traffic_coupling) + e.traffic_coupling * activity(scene, e.role);
    double w = to_linear(e.base_density).watts_per_m2() * share;
    if (e.role != scene.antenna_target) w *= std::pow(10.0, -scene.front_to_back_db / 10.0);
    return PowerDensity{w};
}

namespace {

double overlap_fraction(const Band& b, Frequency f_min, Frequency f_max) {
    const auto lo = std::max(b.f_start, f_min);
    const auto hi = std::min(b.f_stop, f_max);
    if (!(lo < hi)) return 0.0;
    return static_cast<double>((hi - lo).in_hz()) / static_cast<double>(b.width().in_hz());
}

ExpectedReading combine(const Scene& scene, PowerDensity signal, PowerDensityLog floor, bool preamp) {
    ExpectedReading r;
    r.signal = signal;
    r.floor = floor;
    r.level = to_log(signal + to_linear(floor));
    const PowerDensity input = front_end_input(scene);
    r.over_range = preamp && input.watts_per_m2() > 0.0 &&
                   to_log(input).dbm_per_m2() + scene.preamp_gain_db > scene.adc_max.dbm_per_m2();
    return r;
}

}  // namespace

PowerDensity front_end_input(const Scene& scene) {
    double w = 0.0;
    for (const auto& e : scene.emitters)
        if (scene.plan.find(e.band_id)) w += visible_density(scene, e).watts_per_m2();
    return PowerDensity{w};
}

ExpectedReading expected_channel_reading(const Scene& scene, Frequency f_min, Frequency f_max, bool preamp) {
    double signal = 0.0;
    for (const auto& e : scene.emitters) {
        const Band* b = scene.plan.find(e.band_id);
        if (!b) continue;
        signal += visible_density(scene, e).watts_per_m2() * overlap_fraction(*b, f_min, f_max);
    }
    return combine(scene, PowerDensity{signal}, scene.plan.min_level_at(f_min, preamp), preamp);
}

ExpectedReading expected_point_reading(const Scene& scene, Frequency f, bool preamp) {
    double signal = 0.0;
    const Band* host = scene.plan.band_containing(f);
    for (const auto& e : scene.emitters)
        if (host && e.band_id == host->id) signal += visible_density(scene, e).watts_per_m2();
    return combine(scene, PowerDensity{signal}, scene.plan.min_level_at(f, preamp), preamp);
}

double NoiseSource::gaussian() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    // Box-Muller on raw 53-bit uniforms; std::normal_distribution is not
    // specified bit-exactly across standard libraries.
    auto uniform = [this] { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; };
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

double jitter_sigma_db(const Scene& scene, bool preamp, scpi::TypeDetector detector, int avg_samples) {
    double sigma = scene.noise_sigma_db * (preamp ? scene.preamp_noise_factor : 1.0);
    if (detector == scpi::TypeDetector::RollingAverage) sigma /= std::sqrt(std::max(1, avg_samples));
    return sigma;
}

double express(PowerDensityLog level, MeasureUnit unit) {
    return unit == MeasureUnit::DbmPerM2 ? level.dbm_per_m2() : to_field(level).volts_per_meter();
}

double scene_reading(const Scene& scene, Frequency f_min, Frequency f_max, scpi::TypeDetector detector,
                     int avg_samples, MeasureUnit unit, bool preamp, NoiseSource& noise) {
    if (!(f_min < f_max) || f_min < kMinSpanFrequency || f_max > kMaxSpanFrequency)
        throw std::invalid_argument("span outside instrument range");
    const auto expected = expected_channel_reading(scene, f_min, f_max, preamp);
    const double sigma = jitter_sigma_db(scene, preamp, detector, avg_samples);
    return express(PowerDensityLog{expected.level.dbm_per_m2() + sigma * noise.gaussian()}, unit);
}

Scene SceneState::snapshot() const {
    std::lock_guard lock(mu_);
    return scene_;
}

void SceneState::set_traffic(bool active, TrafficDirection direction, double rate_mbps) {
    std::lock_guard lock(mu_);
    scene_.traffic_active = active;
    scene_.traffic_direction = direction;
    scene_.traffic_rate_mbps = active ? std::max(0.0, rate_mbps) : 0.0;
}

void SceneState::set_antenna(EmitterRole target) {
    std::lock_guard lock(mu_);
    scene_.antenna_target = target;
}

void SceneState::update(const std::function<void(Scene&)>& fn) {
    std::lock_guard lock(mu_);
    fn(scene_);
}

}  // namespace emfa::sim
