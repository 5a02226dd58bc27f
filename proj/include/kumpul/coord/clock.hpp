#pragma once

#include <atomic>
#include <chrono>

#include "kumpul/core/time.hpp"

namespace kumpul::coord {

class Clock {
public:
    virtual ~Clock() = default;
    virtual Instant now() const = 0;
};

class SystemClock final : public Clock {
public:
    Instant now() const override {
        return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
    }
};

/// Clock that only moves when told to; lease-expiry scenarios use it to stay
/// deterministic.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Instant start = Instant{std::chrono::hours{24 * 365 * 50}})
        : ms_(start.time_since_epoch().count()) {}

    Instant now() const override { return Instant{std::chrono::milliseconds{ms_.load()}}; }
    void advance(std::chrono::milliseconds d) { ms_ += d.count(); }
    void set(Instant t) { ms_ = t.time_since_epoch().count(); }

private:
    std::atomic<long long> ms_;
};

} // namespace kumpul::coord
