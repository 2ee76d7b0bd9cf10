#include "emfa/scpi/client.hpp"

#include <stdexcept>

#include "emfa/core/units.hpp"
#include "emfa/core/io.hpp"
#include "emfa/scpi/dialect.hpp"

namespace emfa::scpi {

void TcpLineChannel::send_line(std::string_view line) {
    try {
        stream_.write_line(line);
    } catch (const net::NetError& e) {
        throw TransportError(e.what());
    }
}

std::string TcpLineChannel::receive_line(std::chrono::milliseconds timeout) {
    try {
        auto line = stream_.read_line(timeout);
        if (!line) throw TransportError("instrument closed the connection");
        return *line;
    } catch (const net::NetError& e) {
        throw TransportError(e.what());
    }
}

Instrument::Instrument(std::unique_ptr<LineChannel> channel, const Clock& clock)
    : channel_(std::move(channel)), clock_(&clock) {}

Instrument Instrument::connect(const net::Endpoint& address, const Clock& clock,
                               std::chrono::milliseconds timeout) {
    try {
        return Instrument(std::make_unique<TcpLineChannel>(net::TcpStream::connect(address, timeout)), clock);
    } catch (const net::NetError& e) {
        throw TransportError(e.what());
    }
}

std::string Instrument::exchange(std::string_view line) {
    transcript_.record(Direction::Sent, line, clock_->now_seconds());
    channel_->send_line(line);
    std::string reply = channel_->receive_line(kQueryTimeout);
    transcript_.record(Direction::Received, reply, clock_->now_seconds());
    return reply;
}

double Instrument::query_number(std::string_view line) {
    const std::string reply = exchange(line);
    if (auto code = parse_error_frame(reply)) throw QueryFailed(*code, "query '" + std::string(line) +
                                                                           "' failed: " + reply);
    auto v = parse_number(reply);
    if (!v) throw QueryFailed(-1, "unparsable response to '" + std::string(line) + "': " + reply);
    return *v;
}

std::string Instrument::identify() { return exchange(spec_of(Command::Identify).header); }

void Instrument::apply_settings(const InstrumentSettings& settings) {
    if (auto bad = settings.invalid_field()) throw std::invalid_argument("invalid setting: " + *bad);
    for (const auto& cmd : encode_settings(settings)) {
        const std::string reply = exchange(cmd.line);
        if (reply == kAck) continue;
        const int code = parse_error_frame(reply).value_or(-1);
        throw SettingsRejected(std::string(spec_of(cmd.command).field), code);
    }
    unit_ = settings.unit;
    span_start_ = settings.f_start;
    span_stop_ = settings.f_stop;
    if (settings.preamp) preamp_ = settings.preamp;
}

void Instrument::set_ref_level(double level) {
    const std::string reply = exchange(std::string(spec_of(Command::SetRefLevel).header) + " " +
                                       format_number(level));
    if (reply != kAck) throw SettingsRejected("ref_level", parse_error_frame(reply).value_or(-1));
}

void Instrument::set_scale_div(double scale_div) {
    if (!(scale_div > 0.0)) throw std::invalid_argument("invalid setting: scale_div");
    const std::string reply = exchange(std::string(spec_of(Command::SetScaleDiv).header) + " " +
                                       format_number(scale_div));
    if (reply != kAck) throw SettingsRejected("scale_div", parse_error_frame(reply).value_or(-1));
}

double Instrument::query_max_level(Frequency f_min, Frequency f_max) {
    return query_number(encode_span_query(Command::QueryMaxLevel, f_min, f_max));
}

double Instrument::query_channel_power(Frequency f_min, Frequency f_max) {
    return query_number(encode_span_query(Command::QueryChannelPower, f_min, f_max));
}

SpectrumTrace Instrument::query_trace() {
    const std::string_view q = spec_of(Command::QueryTrace).header;
    const std::string reply = exchange(q);
    if (auto code = parse_error_frame(reply)) throw QueryFailed(*code, "trace query failed: " + reply);
    auto values = parse_number_list(reply);
    if (!values || values->size() < 4)
        throw QueryFailed(-1, "unparsable trace response");
    const auto f_start = Frequency::hz(static_cast<std::int64_t>((*values)[0]));
    const auto f_stop = Frequency::hz(static_cast<std::int64_t>((*values)[1]));
    const int n = static_cast<int>(values->size()) - 2;
    const auto grid = trace_grid(f_start, f_stop, n);
    SpectrumTrace trace{f_start, f_stop, {}};
    trace.points.reserve(grid.size());
    for (int i = 0; i < n; ++i) {
        const double v = (*values)[static_cast<std::size_t>(i) + 2];
        const FieldStrength e = unit_ == MeasureUnit::VoltsPerMeter ? FieldStrength{v}
                                                                    : to_field(PowerDensityLog{v});
        trace.points.push_back({grid[static_cast<std::size_t>(i)], e});
    }
    return trace;
}

void Instrument::reset_trace() {
    const std::string reply = exchange(spec_of(Command::ResetTrace).header);
    if (reply != kAck) throw QueryFailed(parse_error_frame(reply).value_or(-1), "trace reset failed: " + reply);
}

void Instrument::set_preamp(bool on) {
    const std::string header(spec_of(Command::SetPreamp).header);
    const std::string reply = exchange(header + (on ? " ON" : " OFF"));
    if (reply != kAck) throw PreampRejected(parse_error_frame(reply).value_or(-1));
    preamp_ = on;
    if (!on || !span_start_.valid()) return;

    const std::string probe = exchange(encode_span_query(Command::QueryMaxLevel, span_start_, span_stop_));
    if (parse_error_frame(probe) == err::kAdcOverRange) {
        exchange(header + " OFF");
        preamp_ = false;
        throw PreampRejected(err::kAdcOverRange);
    }
}

}  // namespace emfa::scpi
