#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "emfa/core/clock.hpp"
#include "emfa/core/net.hpp"
#include "emfa/core/series.hpp"
#include "emfa/scpi/errors.hpp"
#include "emfa/scpi/settings.hpp"
#include "emfa/scpi/transcript.hpp"

namespace emfa::scpi {

inline constexpr std::chrono::milliseconds kQueryTimeout{5000};

/// A bidirectional line stream to an instrument.
class LineChannel {
public:
    virtual ~LineChannel() = default;
    virtual void send_line(std::string_view line) = 0;
    /// Throws TransportError on timeout or disconnect.
    virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

class TcpLineChannel final : public LineChannel {
public:
    explicit TcpLineChannel(net::TcpStream stream) : stream_(std::move(stream)) {}
    void send_line(std::string_view line) override;
    std::string receive_line(std::chrono::milliseconds timeout) override;

private:
    net::TcpStream stream_;
};

/// Handle to one spectrum analyzer. Single owner: one request in flight.
class Instrument {
public:
    Instrument(std::unique_ptr<LineChannel> channel, const Clock& clock);

    /// Opens a TCP connection. Throws TransportError.
    static Instrument connect(const net::Endpoint& address, const Clock& clock,
                              std::chrono::milliseconds timeout = kQueryTimeout);

    std::string identify();

    /// Emits one set command per non-AUTO field in dialect table order.
    /// Throws std::invalid_argument for settings violating their invariants and
    /// SettingsRejected naming the field when the instrument refuses a value.
    void apply_settings(const InstrumentSettings& settings);

    void set_ref_level(double level);
    void set_scale_div(double scale_div);

    /// Peak since the last trace reset over [f_min, f_max], in the current unit.
    double query_max_level(Frequency f_min, Frequency f_max);
    /// Band-integrated power (DBM_M2) or equivalent field (VPM).
    double query_channel_power(Frequency f_min, Frequency f_max);
    SpectrumTrace query_trace();
    void reset_trace();

    /// Switching on probes the current span once; an ADC over-range switches
    /// the pre-amplifier back off and throws PreampRejected.
    void set_preamp(bool on);

    [[nodiscard]] const CommandTranscript& transcript() const { return transcript_; }
    [[nodiscard]] MeasureUnit unit() const { return unit_; }
    [[nodiscard]] std::optional<bool> preamp() const { return preamp_; }

private:
    std::string exchange(std::string_view line);
    double query_number(std::string_view line);

    std::unique_ptr<LineChannel> channel_;
    const Clock* clock_;
    CommandTranscript transcript_;
    MeasureUnit unit_ = MeasureUnit::DbmPerM2;
    Frequency span_start_;
    Frequency span_stop_;
    std::optional<bool> preamp_;
};

}  // namespace emfa::scpi
