// Timestamp parsing and formatting.
//
// All timestamps are integer milliseconds since the Unix epoch, UTC.
// Two textual forms are understood:
//   - a configurable strftime-like pattern (default "%d-%m-%Y:%H.%M:%S",
//     the usual shop-floor export format), optionally followed by ".mmm"
//     milliseconds, and
//   - ISO-8601 ("2010-12-30T00:01:30.000Z") as used by XES date attributes.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cpat {

using TimeMs = std::int64_t;

/// Sentinel for an absent timestamp.
inline constexpr TimeMs kNoTime = INT64_MIN;

inline constexpr std::string_view kDefaultTimestampFormat = "%d-%m-%Y:%H.%M:%S";

/// Parses `text` against `format` (tokens %d %m %Y %H %M %S; everything else
/// is matched literally). A trailing ".mmm" fraction is always accepted.
/// Returns nullopt when the text does not match or encodes an invalid date.
std::optional<TimeMs> parse_timestamp(std::string_view text,
                                      std::string_view format = kDefaultTimestampFormat);

/// Parses an ISO-8601 timestamp with optional fraction and optional
/// "Z" / "+HH:MM" / "-HH:MM" offset suffix.
std::optional<TimeMs> parse_iso8601(std::string_view text);

/// Formats `ms` with `format`, appending ".mmm" when the value carries a
/// sub-second component. Inverse of parse_timestamp for valid inputs.
std::string format_timestamp(TimeMs ms, std::string_view format = kDefaultTimestampFormat);

/// Formats `ms` as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_iso8601(TimeMs ms);

}  // namespace cpat
