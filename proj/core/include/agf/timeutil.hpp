#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace agf {

using TimePoint = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses ISO-8601 date-times at second precision and converts to UTC.
/// Accepts `T` or a space as separator, drops fractional seconds, and honours
/// a trailing `Z` or `+hh:mm` / `-hh:mm` offset. Returns nullopt on anything else.
std::optional<TimePoint> parse_timestamp(std::string_view text) noexcept;

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(TimePoint t);

/// Durations like `90`, `45s`, `30m`, `1h`, `2d`. Plain numbers are seconds.
std::optional<Seconds> parse_duration(std::string_view text) noexcept;

}  // namespace agf
