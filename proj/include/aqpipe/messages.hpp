#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "aqpipe/domain.hpp"
#include "aqpipe/station_log.hpp"

namespace aqpipe {

enum class Performative : std::uint8_t { INFORM, REQUEST, NOT_UNDERSTOOD, FAILURE };

inline std::string_view to_string(Performative p) {
  switch (p) {
    case Performative::INFORM: return "INFORM";
    case Performative::REQUEST: return "REQUEST";
    case Performative::NOT_UNDERSTOOD: return "NOT-UNDERSTOOD";
    default: return "FAILURE";
  }
}

// ---- predicates -------------------------------------------------------------

/// Raw sensor reading entering the society (the sensor-side counterpart of
/// absentNotice).
struct NewMeasurement {
  ChannelId channel = ChannelId::SO2;
  TimeStamp at = 0;
  double value = 0.0;
};

struct AbsentNotice {
  ChannelId channel = ChannelId::SO2;
  TimeStamp at = 0;
};

/// Diagnosis -> Alarm: quantitative and qualitative slots together.
struct SendMeasurement {
  TimeStamp at = 0;
  QualifiedMeasurement measurement;
};

struct RequestMeasurement {
  ChannelId channel = ChannelId::SO2;
};

struct SensorMalfunction {
  ChannelId channel = ChannelId::SO2;
  TimeStamp at = 0;
  int consecutive_invalid = 0;
};

struct StoreTuple {
  MeasurementTuple tuple;
};

struct RaiseAlarm {
  Alarm alarm;
};

struct NotUnderstood {
  std::uint64_t offending_conversation = 0;
};

struct FailureNotice {
  std::string reason;
};

using Predicate = std::variant<NewMeasurement, AbsentNotice, SendMeasurement,
                               RequestMeasurement, SensorMalfunction, StoreTuple,
                               RaiseAlarm, NotUnderstood, FailureNotice>;

inline std::string_view predicate_name(const Predicate& p) {
  struct Visitor {
    std::string_view operator()(const NewMeasurement&) const { return "newMeasurement"; }
    std::string_view operator()(const AbsentNotice&) const { return "absentNotice"; }
    std::string_view operator()(const SendMeasurement&) const { return "sendMeasurement"; }
    std::string_view operator()(const RequestMeasurement&) const { return "requestMeasurement"; }
    std::string_view operator()(const SensorMalfunction&) const { return "sensorMalfunction"; }
    std::string_view operator()(const StoreTuple&) const { return "storeTuple"; }
    std::string_view operator()(const RaiseAlarm&) const { return "raiseAlarm"; }
    std::string_view operator()(const NotUnderstood&) const { return "notUnderstood"; }
    std::string_view operator()(const FailureNotice&) const { return "failure"; }
  };
  return std::visit(Visitor{}, p);
}

struct AgentMessage {
  Performative performative = Performative::INFORM;
  std::string sender;
  std::string receiver;
  std::uint64_t conversation = 0;
  Predicate content;
};

/// The content type must be legal for the performative.
inline bool message_well_formed(const AgentMessage& m) {
  switch (m.performative) {
    case Performative::REQUEST:
      return std::holds_alternative<RequestMeasurement>(m.content);
    case Performative::NOT_UNDERSTOOD:
      return std::holds_alternative<NotUnderstood>(m.content);
    case Performative::FAILURE:
      return std::holds_alternative<FailureNotice>(m.content);
    case Performative::INFORM:
      return std::holds_alternative<NewMeasurement>(m.content) ||
             std::holds_alternative<AbsentNotice>(m.content) ||
             std::holds_alternative<SendMeasurement>(m.content) ||
             std::holds_alternative<SensorMalfunction>(m.content) ||
             std::holds_alternative<StoreTuple>(m.content) ||
             std::holds_alternative<RaiseAlarm>(m.content);
  }
  return false;
}

// ---- JSONL serialization ----------------------------------------------------
// Hand-rolled on purpose: the message log can run to millions of lines and
// key order must be stable for byte-identical deterministic runs.

namespace jsonl {

inline void append_escaped(std::string& out, std::string_view s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void append_field(std::string& out, std::string_view key, std::string_view value,
                         bool quote = true) {
  append_escaped(out, key);
  out += ':';
  if (quote) {
    append_escaped(out, value);
  } else {
    out += value;
  }
}

}  // namespace jsonl

namespace detail {

inline std::string qualified_measurement_json(const QualifiedMeasurement& qm) {
  std::string out = "{";
  jsonl::append_field(out, "channel", channel_name(qm.base.channel));
  out += ',';
  jsonl::append_field(out, "at", format_iso8601(qm.base.at));
  out += ',';
  jsonl::append_field(out, "value", qm.base.value ? format_double(*qm.base.value) : "null",
                      false);
  out += ',';
  jsonl::append_field(out, "tag", to_string(qm.tag));
  out += ',';
  jsonl::append_field(out, "level", qm.level ? std::string(to_string(*qm.level)) : "null",
                      qm.level.has_value());
  out += ',';
  jsonl::append_field(out, "trend", qm.trend ? std::string(to_string(*qm.trend)) : "null",
                      qm.trend.has_value());
  out += ',';
  jsonl::append_field(out, "persistence", std::to_string(qm.persistence), false);
  out += ',';
  jsonl::append_field(out, "estimated", qm.estimated ? "true" : "false", false);
  out += '}';
  return out;
}

inline std::string alarm_json(const Alarm& a) {
  std::string out = "{";
  jsonl::append_field(out, "kind", to_string(a.kind));
  out += ',';
  jsonl::append_field(out, "at", format_iso8601(a.at));
  out += ',';
  jsonl::append_field(out, "channel",
                      a.channel ? std::string(channel_name(*a.channel)) : "null",
                      a.channel.has_value());
  out += ',';
  jsonl::append_field(out, "rule_id", a.rule_id);
  out += ',';
  jsonl::append_field(out, "severity", to_string(a.severity));
  out += ',';
  jsonl::append_field(out, "message", a.message);
  out += '}';
  return out;
}

struct ContentJson {
  std::string operator()(const NewMeasurement& m) const {
    std::string out = "{";
    jsonl::append_field(out, "channel", channel_name(m.channel));
    out += ',';
    jsonl::append_field(out, "at", format_iso8601(m.at));
    out += ',';
    jsonl::append_field(out, "value", format_double(m.value), false);
    out += '}';
    return out;
  }
  std::string operator()(const AbsentNotice& m) const {
    std::string out = "{";
    jsonl::append_field(out, "channel", channel_name(m.channel));
    out += ',';
    jsonl::append_field(out, "at", format_iso8601(m.at));
    out += '}';
    return out;
  }
  std::string operator()(const SendMeasurement& m) const {
    std::string out = "{";
    jsonl::append_field(out, "at", format_iso8601(m.at));
    out += ',';
    jsonl::append_escaped(out, "measurement");
    out += ':';
    out += qualified_measurement_json(m.measurement);
    out += '}';
    return out;
  }
  std::string operator()(const RequestMeasurement& m) const {
    std::string out = "{";
    jsonl::append_field(out, "channel", channel_name(m.channel));
    out += '}';
    return out;
  }
  std::string operator()(const SensorMalfunction& m) const {
    std::string out = "{";
    jsonl::append_field(out, "channel", channel_name(m.channel));
    out += ',';
    jsonl::append_field(out, "at", format_iso8601(m.at));
    out += ',';
    jsonl::append_field(out, "consecutive_invalid", std::to_string(m.consecutive_invalid),
                        false);
    out += '}';
    return out;
  }
  std::string operator()(const StoreTuple& m) const {
    std::string out = "{";
    jsonl::append_field(out, "at", format_iso8601(m.tuple.at));
    out += ',';
    jsonl::append_field(out, "complete", m.tuple.complete ? "true" : "false", false);
    out += '}';
    return out;
  }
  std::string operator()(const RaiseAlarm& m) const {
    std::string out = "{";
    jsonl::append_escaped(out, "alarm");
    out += ':';
    out += alarm_json(m.alarm);
    out += '}';
    return out;
  }
  std::string operator()(const NotUnderstood& m) const {
    std::string out = "{";
    jsonl::append_field(out, "offending_conversation",
                        std::to_string(m.offending_conversation), false);
    out += '}';
    return out;
  }
  std::string operator()(const FailureNotice& m) const {
    std::string out = "{";
    jsonl::append_field(out, "reason", m.reason);
    out += '}';
    return out;
  }
};

}  // namespace detail

/// One message as a single JSON line (no trailing newline).
inline std::string serialize_message(const AgentMessage& m) {
  std::string out = "{";
  jsonl::append_field(out, "performative", to_string(m.performative));
  out += ',';
  jsonl::append_field(out, "sender", m.sender);
  out += ',';
  jsonl::append_field(out, "receiver", m.receiver);
  out += ',';
  jsonl::append_field(out, "conversation", std::to_string(m.conversation), false);
  out += ',';
  jsonl::append_field(out, "predicate", predicate_name(m.content));
  out += ',';
  jsonl::append_escaped(out, "content");
  out += ':';
  out += std::visit(detail::ContentJson{}, m.content);
  out += '}';
  return out;
}

}  // namespace aqpipe
