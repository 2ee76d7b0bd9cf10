#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emfa/analysis/stats.hpp"
#include "emfa/core/clock.hpp"
#include "emfa/core/series.hpp"

namespace emfa::traffic {

struct TrafficSpec {
    TrafficDirection direction = TrafficDirection::Uplink;
    std::optional<double> target_rate_mbps;  // empty: as fast as the link allows
    double duration_s = 120.0;
    double report_interval_s = 1.0;
    int parallel_streams = 1;

    /// Empty when valid, else the name of the first bad field.
    [[nodiscard]] std::optional<std::string> invalid_field() const;
};

enum class SessionState { Running, Stopped, Expired, Failed };

std::string_view to_string(SessionState s);

/// A background bulk transfer. Status and sample reads never wait for the
/// sampler; stop() is idempotent and safe from any thread.
class TrafficSession {
public:
    explicit TrafficSession(TrafficSpec spec) : spec_(std::move(spec)) {}
    virtual ~TrafficSession() = default;

    TrafficSession(const TrafficSession&) = delete;
    TrafficSession& operator=(const TrafficSession&) = delete;

    [[nodiscard]] const TrafficSpec& spec() const { return spec_; }
    [[nodiscard]] SessionState state() const;
    [[nodiscard]] std::vector<ThroughputSample> samples() const;
    [[nodiscard]] std::string failure() const;

    /// RUNNING becomes STOPPED; any other state is kept.
    void stop();

protected:
    void add_sample(ThroughputSample s);
    /// Moves RUNNING to `to`; returns false if the session already ended.
    bool finish(SessionState to, std::string reason = {});
    virtual void on_stop() {}

private:
    TrafficSpec spec_;
    mutable std::mutex mu_;
    SessionState state_ = SessionState::Running;
    std::vector<ThroughputSample> samples_;
    std::string failure_;
};

/// Something that can start transfers: the simulated link or an external tool.
class TrafficBackend {
public:
    virtual ~TrafficBackend() = default;
    /// Returns immediately. An unreachable backend yields a FAILED session.
    virtual std::shared_ptr<TrafficSession> start(const TrafficSpec& spec) = 0;
};

/// Mean and 95% interval of the throughput samples. InsufficientData below two samples.
analysis::Interval summarize(const TrafficSession& session);

}  // namespace emfa::traffic
