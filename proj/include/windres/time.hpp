#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace windres
{

/// Whole minutes since 1970-01-01T00:00:00Z.
using Minute = std::int64_t;

/// Parses an ISO-8601 timestamp and quantizes it to the minute.
///
/// Accepted shapes: `YYYY-MM-DD[T| ]HH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM|+HHMM]`.
/// Seconds round half-up (hh:mm:30 goes to the next minute). A missing
/// offset is read as UTC. Returns nothing for malformed input.
std::optional<Minute> parse_timestamp(std::string_view text);

/// Canonical form, always with an explicit offset: `2020-08-10T14:24:00+00:00`.
std::string format_timestamp(Minute t);

inline constexpr double kMinutesPerHour = 60.0;

} // namespace windres
