#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emfa/core/clock.hpp"
#include "emfa/core/net.hpp"
#include "emfa/traffic/traffic.hpp"

namespace emfa::traffic {

struct IntervalReport {
    std::optional<int> stream;  // empty for [SUM] lines
    double start_s = 0.0;
    double end_s = 0.0;
    double mbps = 0.0;
};

/// Parses one interval line of iperf3 text output, e.g.
/// "[  5]   0.00-1.00   sec  5.62 MBytes  47.1 Mbits/sec". Final summary
/// lines (sender/receiver) and anything else return nullopt.
std::optional<IntervalReport> parse_interval_line(std::string_view line);

struct IperfOptions {
    std::string binary = "iperf3";
    net::Endpoint server{"127.0.0.1", 5201};
};

/// iperf3 client arguments for a spec: -R for downlink, -b for a fixed rate.
std::vector<std::string> iperf_arguments(const IperfOptions& options, const TrafficSpec& spec);

/// Runs the external tool as a child process and records its per-interval
/// reports (only [SUM] lines when more than one stream is used).
class IperfBackend final : public TrafficBackend {
public:
    IperfBackend(IperfOptions options, const Clock& clock) : options_(std::move(options)), clock_(&clock) {}

    std::shared_ptr<TrafficSession> start(const TrafficSpec& spec) override;

private:
    IperfOptions options_;
    const Clock* clock_;
};

}  // namespace emfa::traffic
