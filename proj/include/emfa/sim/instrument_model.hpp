#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emfa/scpi/dialect.hpp"
#include "emfa/sim/scene.hpp"

namespace emfa::sim {

inline constexpr std::string_view kIdentity = "EMFA,SAN-SIM,0,1.0";

/// Command interpreter for one client session of the simulated analyzer.
/// Readings come from a scene snapshot taken per query. Max detectors hold
/// the running peak across queries until TRAC:RES; with the pre-amp on, an
/// over-ranged front end answers every reading with ERR 220.
class InstrumentModel {
public:
    explicit InstrumentModel(std::shared_ptr<const SceneState> scene);

    /// Handles one request line and returns the single response line.
    std::string handle(std::string_view line);

    [[nodiscard]] bool preamp() const { return preamp_; }
    [[nodiscard]] MeasureUnit unit() const { return unit_; }
    [[nodiscard]] double ref_level() const { return ref_level_; }
    [[nodiscard]] double scale_div() const { return scale_div_; }
    [[nodiscard]] scpi::TypeDetector type_detector() const { return type_detector_; }
    [[nodiscard]] int avg_samples() const { return avg_samples_; }
    [[nodiscard]] Frequency f_start() const { return f_start_; }
    [[nodiscard]] Frequency f_stop() const { return f_stop_; }

private:
    std::string handle_set(scpi::Command c, std::string_view args);
    std::string handle_span_query(scpi::Command c, std::string_view args);
    std::string handle_trace();
    [[nodiscard]] int sweep_points(const Scene& scene) const;

    std::shared_ptr<const SceneState> scene_;
    NoiseSource noise_;

    MeasureUnit unit_ = MeasureUnit::DbmPerM2;
    Frequency f_start_ = Frequency::mhz(700);
    Frequency f_stop_ = Frequency::mhz(4000);
    double attenuation_db_ = 0.0;
    Frequency rbw_ = Frequency::khz(100);
    Frequency vbw_ = Frequency::khz(100);
    std::optional<int> sweep_points_;
    scpi::TypeDetector type_detector_ = scpi::TypeDetector::RollingAverage;
    int avg_samples_ = 10;
    bool preamp_ = false;
    double ref_level_ = 65.0;
    double scale_div_ = 10.0;

    // Held peaks in dBm/m^2, keyed by span, and the held trace.
    std::map<std::pair<std::int64_t, std::int64_t>, double> held_peak_;
    std::vector<double> held_trace_;
    std::pair<std::int64_t, std::int64_t> held_trace_span_{};
};

}  // namespace emfa::sim
