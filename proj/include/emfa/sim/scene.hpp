#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "emfa/core/band.hpp"
#include "emfa/core/series.hpp"
#include "emfa/core/units.hpp"
#include "emfa/scpi/settings.hpp"

namespace emfa::sim {

enum class EmitterRole { Rbs, Ue };
enum class PsdShape { Flat };

std::string_view to_string(EmitterRole r);
std::optional<EmitterRole> parse_role(std::string_view s);

struct Emitter {
    std::string band_id;
    EmitterRole role = EmitterRole::Rbs;
    PowerDensityLog base_density{-70.0};  // at the virtual measurement point
    double traffic_coupling = 0.0;        // share present only while traffic flows
    PsdShape psd_shape = PsdShape::Flat;

    bool operator==(const Emitter&) const = default;
};

struct LinkCapacity {
    double ul_mbps = 60.0;
    double dl_mbps = 200.0;

    bool operator==(const LinkCapacity&) const = default;
};

/// Instrument frequency range accepted for spans.
inline constexpr Frequency kMinSpanFrequency = Frequency::mhz(700);
inline constexpr Frequency kMaxSpanFrequency = Frequency::mhz(4000);

/// The synthetic RF world seen through the directive antenna.
///
/// Each emitter contributes its base density scaled by the visible share
/// (1 - c) + c * activity, where c is its traffic coupling and activity in
/// [0, 1] follows the traffic state: a UE under uplink traffic scales with
/// rate / ul capacity, a UE under downlink traffic only sends acknowledgments
/// (ack_fraction * rate / dl capacity); RBS emitters mirror this with the
/// directions swapped. Emitters whose role differs from antenna_target are
/// attenuated by front_to_back_db. The UE transmit-power law is a monotone
/// stand-in, not a measured model.
struct Scene {
    BandPlan plan;
    std::vector<Emitter> emitters;
    EmitterRole antenna_target = EmitterRole::Rbs;
    double front_to_back_db = 20.0;
    double preamp_gain_db = 20.0;
    PowerDensityLog adc_max{-28.77};
    double noise_sigma_db = 0.25;
    double preamp_noise_factor = 0.5;  // jitter multiplier with the pre-amp on
    double ack_fraction = 0.01;
    LinkCapacity link;
    PowerDensityLog max_ref_level{80.0};
    int default_sweep_points = 1001;
    std::uint64_t rng_seed = 1;
    bool traffic_active = false;
    TrafficDirection traffic_direction = TrafficDirection::Uplink;
    double traffic_rate_mbps = 0.0;

    /// Empty when valid, else "field: problem" messages.
    [[nodiscard]] std::vector<std::string> violations() const;

    bool operator==(const Scene&) const = default;
};

/// Empty W3 scene with default instrument parameters.
Scene default_scene();

/// Traffic-driven activity in [0, 1] for an emitter role.
double activity(const Scene& scene, EmitterRole role);

/// Visible linear density of one emitter at the antenna.
PowerDensity visible_density(const Scene& scene, const Emitter& e);

/// Everything the antenna delivers to the instrument input, all bands.
PowerDensity front_end_input(const Scene& scene);

struct ExpectedReading {
    PowerDensityLog level;    // signal + noise floor, noiseless
    PowerDensity signal;      // emitter part only
    PowerDensityLog floor;
    bool over_range = false;  // pre-amp on and front-end input beyond the ADC limit
};

/// Noiseless channel reading over [f_min, f_max]: flat-PSD emitters
/// integrated over their overlap with the span, plus the min_l floor of the
/// band containing f_min for the given pre-amp state.
ExpectedReading expected_channel_reading(const Scene& scene, Frequency f_min, Frequency f_max, bool preamp);

/// Noiseless level of a single sweep point.
ExpectedReading expected_point_reading(const Scene& scene, Frequency f, bool preamp);

/// Seeded Gaussian source, portable across standard libraries.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}
    double gaussian();  // N(0, 1)

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Jitter standard deviation in dB for a reading.
double jitter_sigma_db(const Scene& scene, bool preamp, scpi::TypeDetector detector, int avg_samples);

/// One instrument reading with dB jitter, in the requested unit. Throws
/// std::invalid_argument for a span outside the instrument range.
double scene_reading(const Scene& scene, Frequency f_min, Frequency f_max, scpi::TypeDetector detector,
                     int avg_samples, MeasureUnit unit, bool preamp, NoiseSource& noise);

double express(PowerDensityLog level, MeasureUnit unit);

/// Mutex-guarded scene shared by the instrument server and control channel.
/// Queries work on a consistent snapshot.
class SceneState {
public:
    explicit SceneState(Scene scene) : scene_(std::move(scene)) {}

    [[nodiscard]] Scene snapshot() const;
    void set_traffic(bool active, TrafficDirection direction, double rate_mbps);
    void set_antenna(EmitterRole target);
    void update(const std::function<void(Scene&)>& fn);

private:
    mutable std::mutex mu_;
    Scene scene_;
};

}  // namespace emfa::sim
