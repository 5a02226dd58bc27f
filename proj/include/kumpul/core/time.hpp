#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace kumpul {

/// Record timestamps carry second precision.
using Timestamp = std::chrono::sys_seconds;
/// Job bookkeeping uses millisecond precision so FIFO order is meaningful.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// "2024-09-01T07:30:00Z"
std::string format_rfc3339(Timestamp t);
/// "2024-09-01T07:30:00.250Z"
std::string format_rfc3339(Instant t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)"; a space may replace
/// the 'T'. Returns nullopt on any syntax or range error.
std::optional<Instant> parse_rfc3339(std::string_view s);

/// Parses a timestamp according to a mapping's format: "rfc3339" (default),
/// "unix" (integer seconds), "unix_ms", or a strptime-style pattern
/// interpreted as UTC.
std::optional<Timestamp> parse_timestamp(std::string_view s, std::string_view format);

inline Timestamp to_seconds(Instant t) {
    return std::chrono::floor<std::chrono::seconds>(t);
}

} // namespace kumpul
