#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aqpipe {

/// UTC seconds since the epoch. Accepted measurements must be aligned to the
/// sampling interval (instant % interval == 0).
using TimeStamp = std::int64_t;

inline constexpr std::int64_t kDefaultSamplingIntervalS = 900;  // quarter-hourly

constexpr bool is_aligned(TimeStamp at, std::int64_t interval) noexcept {
  return interval > 0 && at % interval == 0;
}

namespace detail {

// Howard Hinnant's civil-date algorithms; no timezone machinery involved.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

constexpr CivilDate civil_from_days(std::int64_t z) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

}  // namespace detail

constexpr std::int64_t year_of(TimeStamp at) noexcept {
  std::int64_t days = at / 86400;
  if (at % 86400 < 0) --days;
  return detail::civil_from_days(days).year;
}

constexpr TimeStamp timestamp_from_civil(std::int64_t y, unsigned mo, unsigned d,
                                         unsigned h = 0, unsigned mi = 0,
                                         unsigned s = 0) noexcept {
  return detail::days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

/// Formats as strict ISO-8601 UTC, e.g. "2000-01-01T00:15:00Z".
inline std::string format_iso8601(TimeStamp at) {
  std::int64_t days = at / 86400;
  std::int64_t sod = at % 86400;
  if (sod < 0) {
    sod += 86400;
    --days;
  }
  const auto cd = detail::civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(cd.year), cd.month, cd.day,
                static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60),
                static_cast<long long>(sod % 60));
  return buf;
}

/// Strict "YYYY-MM-DDThh:mm:ssZ" parser. Returns nullopt on any deviation.
inline std::optional<TimeStamp> parse_iso8601(std::string_view text) noexcept {
  if (text.size() != 20) return std::nullopt;
  auto digit = [&](std::size_t i) -> int {
    char c = text[i];
    return (c >= '0' && c <= '9') ? c - '0' : -1;
  };
  auto num = [&](std::size_t start, std::size_t len) -> std::int64_t {
    std::int64_t v = 0;
    for (std::size_t i = start; i < start + len; ++i) {
      int d = digit(i);
      if (d < 0) return -1;
      v = v * 10 + d;
    }
    return v;
  };
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  const std::int64_t y = num(0, 4), mo = num(5, 2), d = num(8, 2);
  const std::int64_t h = num(11, 2), mi = num(14, 2), s = num(17, 2);
  if (y < 0 || mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 ||
      mi < 0 || mi > 59 || s < 0 || s > 59) {
    return std::nullopt;
  }
  return timestamp_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d),
                              static_cast<unsigned>(h), static_cast<unsigned>(mi),
                              static_cast<unsigned>(s));
}

}  // namespace aqpipe
