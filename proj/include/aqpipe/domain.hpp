#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aqpipe/channel.hpp"
#include "aqpipe/time_utils.hpp"

namespace aqpipe {

enum class ValidationTag : std::uint8_t { valid, invalid };

/// Qualitative value range, ordered low < medium < high.
enum class Level : std::uint8_t { low = 0, medium = 1, high = 2 };

enum class Trend : std::uint8_t { falling, steady, rising };

enum class AlarmKind : std::uint8_t { formal, custom, malfunction };

enum class Severity : std::uint8_t { info, warning, alert };

enum class Medium : std::uint8_t { email, sms };

/// One raw sensor reading. `value` is absent on sensor dropouts.
struct Measurement {
  ChannelId channel = ChannelId::SO2;
  TimeStamp at = 0;
  std::optional<double> value;
};

/// A measurement after diagnosis: validity plus qualitative interpretation.
/// `level` is absent only for timeout placeholders; `trend` is absent for
/// estimated entries (the estimator emits a level only).
struct QualifiedMeasurement {
  Measurement base;
  ValidationTag tag = ValidationTag::valid;
  std::optional<Level> level;
  std::optional<Trend> trend;
  int persistence = 0;  // consecutive samples at the same level; >= 1 when level is set
  bool estimated = false;

  friend bool operator==(const QualifiedMeasurement&, const QualifiedMeasurement&);
};

inline bool operator==(const Measurement& a, const Measurement& b) {
  return a.channel == b.channel && a.at == b.at && a.value == b.value;
}

inline bool operator==(const QualifiedMeasurement& a, const QualifiedMeasurement& b) {
  return a.base == b.base && a.tag == b.tag && a.level == b.level &&
         a.trend == b.trend && a.persistence == b.persistence &&
         a.estimated == b.estimated;
}

/// The joined record of all eleven channels at one timestamp, keyed by
/// canonical channel order. `complete` is false when assembly timed out and
/// gaps were filled with placeholders.
struct MeasurementTuple {
  TimeStamp at = 0;
  PerChannel<QualifiedMeasurement> entries{};
  bool complete = true;

  const QualifiedMeasurement& entry(ChannelId c) const { return entries[channel_index(c)]; }
  QualifiedMeasurement& entry(ChannelId c) { return entries[channel_index(c)]; }
};

struct Alarm {
  AlarmKind kind = AlarmKind::formal;
  TimeStamp at = 0;
  std::optional<ChannelId> channel;  // required for formal and malfunction
  std::string rule_id;
  Severity severity = Severity::info;
  std::string message;
};

/// A stable identity for de-duplication: one alert per (alarm, user).
inline std::string alarm_identity(const Alarm& a) {
  std::string key;
  key += std::to_string(static_cast<int>(a.kind));
  key += '|';
  key += std::to_string(a.at);
  key += '|';
  key += a.channel ? std::string(channel_name(*a.channel)) : std::string("-");
  key += '|';
  key += a.rule_id;
  return key;
}

struct UserProfile {
  std::string user_id;
  std::set<AlarmKind> subscribed_kinds;
  bool all_channels = true;
  std::set<ChannelId> subscribed_channels;  // ignored when all_channels
  Medium medium = Medium::email;
  std::string address;
};

struct Alert {
  Alarm alarm;
  std::string recipient;
  Medium medium = Medium::email;
  std::string rendered;
};

// ---- enum <-> text ----------------------------------------------------------

inline std::string_view to_string(ValidationTag t) {
  return t == ValidationTag::valid ? "valid" : "invalid";
}
inline std::string_view tag_code(ValidationTag t) {
  return t == ValidationTag::valid ? "V" : "I";
}
inline std::string_view to_string(Level l) {
  switch (l) {
    case Level::low: return "low";
    case Level::medium: return "medium";
    default: return "high";
  }
}
inline std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::falling: return "falling";
    case Trend::steady: return "steady";
    default: return "rising";
  }
}
inline std::string_view to_string(AlarmKind k) {
  switch (k) {
    case AlarmKind::formal: return "formal";
    case AlarmKind::custom: return "custom";
    default: return "malfunction";
  }
}
inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    default: return "alert";
  }
}
inline std::string_view to_string(Medium m) {
  return m == Medium::email ? "email" : "sms";
}

inline std::optional<Level> parse_level(std::string_view s) {
  if (s == "low") return Level::low;
  if (s == "medium") return Level::medium;
  if (s == "high") return Level::high;
  return std::nullopt;
}
inline std::optional<Trend> parse_trend(std::string_view s) {
  if (s == "falling") return Trend::falling;
  if (s == "steady") return Trend::steady;
  if (s == "rising") return Trend::rising;
  return std::nullopt;
}
inline std::optional<AlarmKind> parse_alarm_kind(std::string_view s) {
  if (s == "formal") return AlarmKind::formal;
  if (s == "custom") return AlarmKind::custom;
  if (s == "malfunction") return AlarmKind::malfunction;
  return std::nullopt;
}
inline std::optional<Severity> parse_severity(std::string_view s) {
  if (s == "info") return Severity::info;
  if (s == "warning") return Severity::warning;
  if (s == "alert") return Severity::alert;
  return std::nullopt;
}
inline std::optional<Medium> parse_medium(std::string_view s) {
  if (s == "email") return Medium::email;
  if (s == "sms") return Medium::sms;
  return std::nullopt;
}

}  // namespace aqpipe
