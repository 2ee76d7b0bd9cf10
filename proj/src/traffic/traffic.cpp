#include "emfa/traffic/traffic.hpp"

#include <cmath>

namespace emfa::traffic {

std::optional<std::string> TrafficSpec::invalid_field() const {
    if (target_rate_mbps && !(*target_rate_mbps > 0.0 && std::isfinite(*target_rate_mbps))) return "target_rate";
    if (!(duration_s > 0.0 && std::isfinite(duration_s))) return "duration";
    if (!(report_interval_s > 0.0 && std::isfinite(report_interval_s))) return "report_interval";
    if (parallel_streams < 1) return "parallel_streams";
    return std::nullopt;
}

std::string_view to_string(SessionState s) {
    switch (s) {
        case SessionState::Running: return "RUNNING";
        case SessionState::Stopped: return "STOPPED";
        case SessionState::Expired: return "EXPIRED";
        case SessionState::Failed: return "FAILED";
    }
    return "?";
}

SessionState TrafficSession::state() const {
    std::lock_guard lock(mu_);
    return state_;
}

std::vector<ThroughputSample> TrafficSession::samples() const {
    std::lock_guard lock(mu_);
    return samples_;
}

std::string TrafficSession::failure() const {
    std::lock_guard lock(mu_);
    return failure_;
}

void TrafficSession::stop() {
    if (finish(SessionState::Stopped)) on_stop();
}

void TrafficSession::add_sample(ThroughputSample s) {
    std::lock_guard lock(mu_);
    if (state_ == SessionState::Running) samples_.push_back(s);
}

bool TrafficSession::finish(SessionState to, std::string reason) {
    std::lock_guard lock(mu_);
    if (state_ != SessionState::Running) return false;
    state_ = to;
    failure_ = std::move(reason);
    return true;
}

analysis::Interval summarize(const TrafficSession& session) {
    std::vector<double> mbps;
    for (const auto& s : session.samples()) mbps.push_back(s.mbps);
    return analysis::confidence_interval(mbps);
}

}  // namespace emfa::traffic
