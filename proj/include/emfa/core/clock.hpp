#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

namespace emfa {

/// Time source injected into every component that sleeps or timestamps.
/// Time points are durations since the clock's own epoch.
class Clock {
public:
    using Duration = std::chrono::nanoseconds;
    using TimePoint = Duration;
    using TimerId = std::uint64_t;

    virtual ~Clock() = default;

    [[nodiscard]] virtual TimePoint now() const = 0;
    virtual void sleep_for(Duration d) = 0;

    /// Runs fn once the clock reaches `at`. Callbacks must not block.
    virtual TimerId call_at(TimePoint at, std::function<void()> fn) = 0;
    virtual void cancel(TimerId id) = 0;

    [[nodiscard]] double now_seconds() const {
        return std::chrono::duration<double>(now()).count();
    }
    void sleep_seconds(double s) {
        sleep_for(std::chrono::duration_cast<Duration>(std::chrono::duration<double>(s)));
    }
};

[[nodiscard]] inline Clock::Duration seconds_to_duration(double s) {
    return std::chrono::duration_cast<Clock::Duration>(std::chrono::duration<double>(s));
}

/// Virtual time: advances only through sleep_for/advance. Due timers fire on
/// the advancing thread, in time order, with now() equal to their due time.
class SimulatedClock final : public Clock {
public:
    explicit SimulatedClock(TimePoint start = TimePoint{}) : now_(start) {}

    [[nodiscard]] TimePoint now() const override;
    void sleep_for(Duration d) override { advance(d); }
    TimerId call_at(TimePoint at, std::function<void()> fn) override;
    void cancel(TimerId id) override;

    void advance(Duration d);
    [[nodiscard]] std::size_t pending_timers() const;

private:
    mutable std::mutex mu_;
    TimePoint now_;
    TimerId next_id_ = 1;
    // (due, id) keeps insertion order among timers due at the same instant.
    std::map<std::pair<TimePoint, TimerId>, std::function<void()>> timers_;
};

/// Wall time relative to construction; timers run on a private worker thread.
class SteadyClock final : public Clock {
public:
    SteadyClock();
    ~SteadyClock() override;

    SteadyClock(const SteadyClock&) = delete;
    SteadyClock& operator=(const SteadyClock&) = delete;

    [[nodiscard]] TimePoint now() const override;
    void sleep_for(Duration d) override;
    TimerId call_at(TimePoint at, std::function<void()> fn) override;
    void cancel(TimerId id) override;

private:
    void run(std::stop_token stop);

    std::chrono::steady_clock::time_point epoch_;
    std::mutex mu_;
    std::condition_variable_any cv_;
    TimerId next_id_ = 1;
    std::map<std::pair<TimePoint, TimerId>, std::function<void()>> timers_;
    std::jthread worker_;
};

}  // namespace emfa
