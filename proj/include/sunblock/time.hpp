#pragma once

// Simulated clock shared by every module. Timestamps are microseconds since
// the scenario epoch, matching the native resolution of classic pcap.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace sunblock {

struct SimClock {
    using rep = std::int64_t;
    using period = std::micro;
    using duration = std::chrono::duration<rep, period>;
    using time_point = std::chrono::time_point<SimClock>;
    static constexpr bool is_steady = true;
};

using Duration = SimClock::duration;
using Timestamp = SimClock::time_point;

inline constexpr Timestamp kEpoch{};
inline constexpr Timestamp kNever = Timestamp::max();

inline Duration seconds_to_duration(double s) {
    return Duration{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

inline Timestamp at_seconds(double s) { return kEpoch + seconds_to_duration(s); }

inline constexpr Timestamp at_micros(std::int64_t us) { return kEpoch + Duration{us}; }

inline constexpr std::int64_t micros(Timestamp t) { return t.time_since_epoch().count(); }

inline constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1e6; }

inline constexpr double to_seconds(Timestamp t) { return to_seconds(t.time_since_epoch()); }

// Exact decimal rendering "sec.micros" with no floating point involved.
inline std::string format_ts(Timestamp t) {
    const std::int64_t us = micros(t);
    const bool neg = us < 0;
    const std::int64_t a = neg ? -us : us;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s%lld.%06lld", neg ? "-" : "", static_cast<long long>(a / 1000000),
                  static_cast<long long>(a % 1000000));
    return buf;
}

}  // namespace sunblock
