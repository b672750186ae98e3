#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqpipe/domain.hpp"

namespace aqpipe {

/// One row of a station log: optional value and (in labeled logs) optional
/// validation tag per channel. Within a file, timestamps advance by exactly
/// one sampling interval; gaps appear as rows with absent values.
struct StationLogRecord {
  TimeStamp at = 0;
  PerChannel<std::optional<double>> values{};
  PerChannel<std::optional<ValidationTag>> tags{};

  bool operator==(const StationLogRecord&) const = default;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedLog {
  std::vector<StationLogRecord> records;
  bool labeled = false;
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kLogHeader =
    "timestamp,SO2,O3,NO,NO2,NOX,VEL,DIR,TEM,HR,RAD,PRE";
inline constexpr std::string_view kLogTagHeader =
    ",SO2_tag,O3_tag,NO_tag,NO2_tag,NOX_tag,VEL_tag,DIR_tag,TEM_tag,HR_tag,"
    "RAD_tag,PRE_tag";

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace detail

/// Parses the station log CSV. Malformed header or a broken timestamp
/// sequence is fatal; an unparseable cell degrades to absent with a warning.
inline ParsedLog parse_station_log(std::istream& in,
                                   std::int64_t sampling_interval = kDefaultSamplingIntervalS) {
  ParsedLog out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: empty input, header expected");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == kLogHeader) {
    out.labeled = false;
  } else if (line == std::string(kLogHeader) + std::string(kLogTagHeader)) {
    out.labeled = true;
  } else {
    throw ParseError("line 1: malformed header");
  }
  const std::size_t expected_cols = 1 + kChannelCount + (out.labeled ? kChannelCount : 0);

  std::size_t line_no = 1;
  std::optional<TimeStamp> prev;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != expected_cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_cols) + " columns, got " +
                       std::to_string(cells.size()));
    }
    StationLogRecord rec;
    const auto at = parse_iso8601(cells[0]);
    if (!at) {
      throw ParseError("line " + std::to_string(line_no) + ": bad timestamp '" +
                       std::string(cells[0]) + "'");
    }
    rec.at = *at;
    if (!is_aligned(rec.at, sampling_interval)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": timestamp not aligned to sampling interval");
    }
    if (prev) {
      if (rec.at <= *prev) {
        throw ParseError("line " + std::to_string(line_no) + ": non-monotone timestamp");
      }
      if (rec.at != *prev + sampling_interval) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": timestamp gap (records must advance by one interval)");
      }
    }
    prev = rec.at;

    for (std::size_t i = 0; i < kChannelCount; ++i) {
      const auto cell = cells[1 + i];
      if (cell.empty()) continue;
      const auto v = detail::parse_double(cell);
      if (!v) {
        out.warnings.push_back("line " + std::to_string(line_no) + ": unparseable " +
                               std::string(kChannelNames[i]) + " cell '" +
                               std::string(cell) + "' treated as absent");
        continue;
      }
      rec.values[i] = *v;
    }
    if (out.labeled) {
      for (std::size_t i = 0; i < kChannelCount; ++i) {
        const auto cell = cells[1 + kChannelCount + i];
        if (cell.empty()) continue;
        if (cell == "V") {
          rec.tags[i] = ValidationTag::valid;
        } else if (cell == "I") {
          rec.tags[i] = ValidationTag::invalid;
        } else {
          out.warnings.push_back("line " + std::to_string(line_no) + ": bad tag cell '" +
                                 std::string(cell) + "' treated as absent");
        }
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

inline ParsedLog parse_station_log(const std::string& text,
                                   std::int64_t sampling_interval = kDefaultSamplingIntervalS) {
  std::istringstream in(text);
  return parse_station_log(in, sampling_interval);
}

inline void serialize_station_log(const std::vector<StationLogRecord>& records,
                                  std::ostream& out, bool labeled) {
  out << kLogHeader;
  if (labeled) out << kLogTagHeader;
  out << '\n';
  for (const auto& rec : records) {
    out << format_iso8601(rec.at);
    for (std::size_t i = 0; i < kChannelCount; ++i) {
      out << ',';
      if (rec.values[i]) out << detail::format_double(*rec.values[i]);
    }
    if (labeled) {
      for (std::size_t i = 0; i < kChannelCount; ++i) {
        out << ',';
        if (rec.tags[i]) out << tag_code(*rec.tags[i]);
      }
    }
    out << '\n';
  }
}

inline std::string serialize_station_log(const std::vector<StationLogRecord>& records,
                                         bool labeled) {
  std::ostringstream out;
  serialize_station_log(records, out, labeled);
  return out.str();
}

}  // namespace aqpipe
