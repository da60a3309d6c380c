#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcs {

/// Base error for malformed workloads, traces and rejected operations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Signed count of simulation quanta. Differences between time values
/// (d - t, C - e) are expressed in this type because they may be negative.
using quanta_t = std::int64_t;

/// Non-negative length of time in quanta (execution time, budgets, deadlines
/// relative to arrival, band precision).
class Duration {
public:
    constexpr Duration() = default;
    constexpr explicit Duration(quanta_t quanta) : quanta_(quanta)
    {
        if (quanta < 0) {
            throw Error("negative duration: " + std::to_string(quanta));
        }
    }

    constexpr quanta_t count() const noexcept { return quanta_; }

    constexpr auto operator<=>(const Duration&) const = default;

    constexpr Duration& operator+=(Duration other) noexcept
    {
        quanta_ += other.quanta_;
        return *this;
    }

    friend constexpr Duration operator+(Duration a, Duration b) noexcept { return a += b; }

private:
    quanta_t quanta_ = 0;
};

/// A point on one of the two time axes. GroundTime is the simulator's dense
/// real-time axis (discretized); ClockValue is what the machine clock reads.
template <class Tag>
class TimePoint {
public:
    constexpr TimePoint() = default;
    constexpr explicit TimePoint(quanta_t quanta) : quanta_(quanta)
    {
        if (quanta < 0) {
            throw Error("negative time value: " + std::to_string(quanta));
        }
    }

    constexpr quanta_t count() const noexcept { return quanta_; }

    constexpr auto operator<=>(const TimePoint&) const = default;

    friend constexpr TimePoint operator+(TimePoint p, Duration d) { return TimePoint(p.quanta_ + d.count()); }

    /// Signed distance between two points on the same axis.
    friend constexpr quanta_t operator-(TimePoint a, TimePoint b) noexcept { return a.quanta_ - b.quanta_; }

private:
    quanta_t quanta_ = 0;
};

struct ground_axis_tag {};
struct clock_axis_tag {};

using GroundTime = TimePoint<ground_axis_tag>;
using ClockValue = TimePoint<clock_axis_tag>;

/// Equality within a band's precision: |a - b| <= rho.
constexpr bool rho_eq(quanta_t a, quanta_t b, Duration rho) noexcept
{
    const quanta_t diff = a > b ? a - b : b - a;
    return diff <= rho.count();
}

/// A time band: the unit label of one quantum plus the precision below which
/// durations are treated as instantaneous.
struct TimeBand {
    std::string granularity = "1q";
    Duration precision{};

    bool operator==(const TimeBand&) const = default;
};

} // namespace mcs
