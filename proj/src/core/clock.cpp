#include "emfa/core/clock.hpp"

#include <algorithm>

namespace emfa {

Clock::TimePoint SimulatedClock::now() const {
    std::lock_guard lock(mu_);
    return now_;
}

Clock::TimerId SimulatedClock::call_at(TimePoint at, std::function<void()> fn) {
    std::lock_guard lock(mu_);
    const TimerId id = next_id_++;
    timers_.emplace(std::pair{std::max(at, now_), id}, std::move(fn));
    return id;
}

void SimulatedClock::cancel(TimerId id) {
    std::lock_guard lock(mu_);
    std::erase_if(timers_, [id](const auto& kv) { return kv.first.second == id; });
}

void SimulatedClock::advance(Duration d) {
    std::unique_lock lock(mu_);
    const TimePoint target = now_ + d;
    while (!timers_.empty() && timers_.begin()->first.first <= target) {
        auto node = timers_.extract(timers_.begin());
        now_ = node.key().first;
        lock.unlock();
        node.mapped()();
        lock.lock();
    }
    now_ = std::max(now_, target);
}

std::size_t SimulatedClock::pending_timers() const {
    std::lock_guard lock(mu_);
    return timers_.size();
}

SteadyClock::SteadyClock()
    : epoch_(std::chrono::steady_clock::now()), worker_([this](std::stop_token st) { run(st); }) {}

SteadyClock::~SteadyClock() {
    worker_.request_stop();
    cv_.notify_all();
}

Clock::TimePoint SteadyClock::now() const {
    return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - epoch_);
}

void SteadyClock::sleep_for(Duration d) { std::this_thread::sleep_for(d); }

Clock::TimerId SteadyClock::call_at(TimePoint at, std::function<void()> fn) {
    TimerId id;
    {
        std::lock_guard lock(mu_);
        id = next_id_++;
        timers_.emplace(std::pair{at, id}, std::move(fn));
    }
    cv_.notify_all();
    return id;
}

void SteadyClock::cancel(TimerId id) {
    std::lock_guard lock(mu_);
    std::erase_if(timers_, [id](const auto& kv) { return kv.first.second == id; });
}

void SteadyClock::run(std::stop_token stop) {
    std::unique_lock lock(mu_);
    while (!stop.stop_requested()) {
        if (timers_.empty()) {
            cv_.wait(lock, stop, [this] { return !timers_.empty(); });
            continue;
        }
        const TimePoint due = timers_.begin()->first.first;
        const auto wake = epoch_ + due;
        if (std::chrono::steady_clock::now() < wake) {
            cv_.wait_until(lock, stop, wake,
                           [&] { return timers_.empty() || timers_.begin()->first.first < due; });
            continue;
        }
        auto node = timers_.extract(timers_.begin());
        lock.unlock();
        node.mapped()();
        lock.lock();
    }
}

}  // namespace emfa
