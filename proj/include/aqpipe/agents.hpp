#pragma once

#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "aqpipe/bus.hpp"
#include "aqpipe/fat.hpp"
#include "aqpipe/features.hpp"
#include "aqpipe/qualify.hpp"
#include "aqpipe/rules.hpp"
#include "aqpipe/tree.hpp"

namespace aqpipe {

// ---- diagnosis ---------------------------------------------------------------

/// Wide accept band used when no validation model applies (bootstrap and
/// model-less channels).
struct SanityRange {
  double min = -1e9;
  double max = 1e9;

  bool accepts(double v) const { return std::isfinite(v) && v >= min && v <= max; }
};

struct DiagnosisConfig {
  ChannelId channel = ChannelId::O3;
  LevelBins bins;
  double trend_epsilon = 0.5;
  int trend_window = 3;
  int malfunction_k = 4;
  SanityRange sanity;
  std::shared_ptr<const DecisionTree> imv_tree;   // absent -> range sanity only
  std::shared_ptr<const RuleSet> imv_rules;       // compiled from imv_tree
  std::shared_ptr<const DecisionTree> mve_tree;   // absent -> last-level fallback
  std::string alarm_agent = "alarm";
};

struct DiagnosisState {
  std::deque<std::optional<double>> history;  // raw observations, newest last
  std::optional<double> last_valid, second_last_valid;
  std::optional<QualifiedMeasurement> last;
  int consecutive_invalid = 0;
  bool malfunction_latched = false;
  // counters surfaced in run summaries
  std::uint64_t bootstrap_validations = 0;
  std::uint64_t degraded_trends = 0;
};

namespace detail {

inline void push_history(DiagnosisState& state, std::optional<double> value) {
  state.history.push_back(value);
  while (state.history.size() > static_cast<std::size_t>(kValidationHistory)) {
    state.history.pop_front();
  }
}

inline std::vector<std::optional<double>> history_vector(const DiagnosisState& state) {
  return {state.history.begin(), state.history.end()};
}

/// Last trend_window defined raw values, newest last.
inline std::vector<std::optional<double>> trend_window_values(const DiagnosisState& state,
                                                              int window) {
  std::vector<std::optional<double>> out;
  for (auto it = state.history.rbegin(); it != state.history.rend(); ++it) {
    if (!*it) continue;
    out.push_back(*it);
    if (static_cast<int>(out.size()) == window) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

inline bool classify_with_model(const DiagnosisConfig& cfg,
                                const std::vector<std::optional<double>>& features) {
  bool fully_defined = true;
  for (const auto& f : features) fully_defined &= f.has_value();
  int klass;
  if (fully_defined && cfg.imv_rules) {
    std::vector<double> defined;
    defined.reserve(features.size());
    for (const auto& f : features) defined.push_back(*f);
    klass = eval_rules(*cfg.imv_rules, defined);
  } else {
    klass = predict(*cfg.imv_tree, features).klass;
  }
  return cfg.imv_tree->class_values[static_cast<std::size_t>(klass)] == "valid";
}

inline Level estimate_level(const DiagnosisConfig& cfg, const DiagnosisState& state) {
  if (cfg.mve_tree) {
    std::vector<std::optional<double>> feats(kChannelCount - 1, std::nullopt);
    feats.push_back(state.last_valid);
    feats.push_back(state.second_last_valid);
    const auto pred = predict(*cfg.mve_tree, feats);
    if (const auto l = parse_level(cfg.mve_tree->class_values[static_cast<std::size_t>(pred.klass)])) {
      return *l;
    }
  }
  if (state.last && state.last->level) return *state.last->level;
  return Level::low;
}

}  // namespace detail

/// The diagnosis workflow: validate an incoming measurement, qualify it or
/// estimate a level for it, and escalate persistent invalidity exactly once
/// per streak.
inline std::vector<AgentMessage> diagnosis_handle(DiagnosisState& state,
                                                  const DiagnosisConfig& cfg,
                                                  const std::string& self,
                                                  const AgentMessage& msg,
                                                  std::uint64_t conversation) {
  std::vector<AgentMessage> out;

  auto send_to_alarm = [&](Predicate content) {
    AgentMessage m;
    m.performative = Performative::INFORM;
    m.sender = self;
    m.receiver = cfg.alarm_agent;
    m.conversation = conversation;
    m.content = std::move(content);
    out.push_back(std::move(m));
  };

  auto invalid_path = [&](TimeStamp at) {
    const Level level = detail::estimate_level(cfg, state);
    QualifiedMeasurement qm;
    qm.base = {cfg.channel, at, std::nullopt};
    qm.tag = ValidationTag::invalid;
    qm.level = level;
    qm.trend = std::nullopt;  // the estimator yields a level only
    qm.persistence = update_persistence(state.last, level);
    qm.estimated = true;
    state.last = qm;
    ++state.consecutive_invalid;
    send_to_alarm(SendMeasurement{at, qm});
    if (state.consecutive_invalid == cfg.malfunction_k && !state.malfunction_latched) {
      state.malfunction_latched = true;
      send_to_alarm(SensorMalfunction{cfg.channel, at, state.consecutive_invalid});
    }
  };

  if (msg.performative == Performative::INFORM &&
      std::holds_alternative<NewMeasurement>(msg.content)) {
    const auto& nm = std::get<NewMeasurement>(msg.content);
    detail::push_history(state, nm.value);

    bool valid;
    if (!cfg.imv_tree || state.history.size() < static_cast<std::size_t>(kValidationHistory)) {
      valid = cfg.sanity.accepts(nm.value);
      if (cfg.imv_tree) ++state.bootstrap_validations;
    } else {
      const auto features =
          assemble_validation_features(detail::history_vector(state));
      valid = detail::classify_with_model(cfg, features);
    }

    if (valid) {
      const Level level = qualify_level(nm.value, cfg.bins);
      const auto window = detail::trend_window_values(state, cfg.trend_window);
      if (window.size() < 2) ++state.degraded_trends;
      const Trend trend = qualify_trend(window, cfg.trend_epsilon);
      QualifiedMeasurement qm;
      qm.base = {cfg.channel, nm.at, nm.value};
      qm.tag = ValidationTag::valid;
      qm.level = level;
      qm.trend = trend;
      qm.persistence = update_persistence(state.last, level);
      qm.estimated = false;
      state.last = qm;
      state.second_last_valid = state.last_valid;
      state.last_valid = nm.value;
      state.consecutive_invalid = 0;
      state.malfunction_latched = false;
      send_to_alarm(SendMeasurement{nm.at, qm});
    } else {
      invalid_path(nm.at);
    }
    return out;
  }

  if (msg.performative == Performative::INFORM &&
      std::holds_alternative<AbsentNotice>(msg.content)) {
    const auto& an = std::get<AbsentNotice>(msg.content);
    detail::push_history(state, std::nullopt);
    invalid_path(an.at);
    return out;
  }

  if (msg.performative == Performative::REQUEST &&
      std::holds_alternative<RequestMeasurement>(msg.content)) {
    if (state.last) {
      AgentMessage reply;
      reply.performative = Performative::INFORM;
      reply.sender = self;
      reply.receiver = msg.sender;
      reply.conversation = msg.conversation;
      reply.content = SendMeasurement{state.last->base.at, *state.last};
      out.push_back(std::move(reply));
    } else {
      AgentMessage reply;
      reply.performative = Performative::FAILURE;
      reply.sender = self;
      reply.receiver = msg.sender;
      reply.conversation = msg.conversation;
      reply.content = FailureNotice{"no measurement recorded yet"};
      out.push_back(std::move(reply));
    }
    return out;
  }

  // Replies routed back to us need no action.
  if (msg.performative == Performative::FAILURE ||
      msg.performative == Performative::NOT_UNDERSTOOD) {
    return out;
  }

  AgentMessage reply;
  reply.performative = Performative::NOT_UNDERSTOOD;
  reply.sender = self;
  reply.receiver = msg.sender;
  reply.conversation = msg.conversation;
  reply.content = NotUnderstood{msg.conversation};
  out.push_back(std::move(reply));
  return out;
}

class DiagnosisAgent : public Agent {
 public:
  explicit DiagnosisAgent(DiagnosisConfig cfg)
      : cfg_(std::move(cfg)), id_("diag:" + std::string(channel_name(cfg_.channel))) {}

  const std::string& id() const override { return id_; }

  void handle(const AgentMessage& msg, Bus& bus) override {
    for (auto& m : diagnosis_handle(state_, cfg_, id_, msg, msg.conversation)) {
      bus.send(std::move(m));
    }
  }

  const DiagnosisState& state() const { return state_; }

 private:
  DiagnosisConfig cfg_;
  DiagnosisState state_;
  std::string id_;
};

// ---- alarm -------------------------------------------------------------------

struct AlarmConfig {
  std::vector<ThresholdRule> thresholds;
  std::shared_ptr<const DecisionTree> ica_tree;
  std::string ica_model_id = "ica";
  int timeout_idle_steps = 2;
  /// Close older pending timestamps as soon as a newer one appears. Sound
  /// only when arrivals are globally ordered by timestamp (deterministic
  /// scheduling); concurrent runs rely on completion counting plus the idle
  /// timeout instead.
  bool watermark = true;
  std::string db_agent = "db";
  std::string dist_agent = "dist";
};

struct AlarmState {
  struct Pending {
    PerChannel<std::optional<QualifiedMeasurement>> entries{};
    int filled = 0;
    int idle_age = 0;
  };
  std::map<TimeStamp, Pending> pending;
  std::uint64_t duplicate_entries = 0;
  std::uint64_t tuples_closed = 0;
  std::uint64_t custom_alarms = 0;
};

namespace detail {

inline MeasurementTuple close_pending(TimeStamp at, const AlarmState::Pending& p) {
  MeasurementTuple tuple;
  tuple.at = at;
  tuple.complete = p.filled == static_cast<int>(kChannelCount);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (p.entries[c]) {
      tuple.entries[c] = *p.entries[c];
    } else {
      // placeholder: invalid, no level, no value
      QualifiedMeasurement qm;
      qm.base = {kAllChannels[c], at, std::nullopt};
      qm.tag = ValidationTag::invalid;
      qm.persistence = 0;
      qm.estimated = false;
      tuple.entries[c] = qm;
    }
  }
  return tuple;
}

/// The three completion activities in fixed order: store, formal alarms,
/// custom alarm.
inline void tuple_activities(AlarmState& state, const AlarmConfig& cfg,
                             const std::string& self, std::uint64_t conversation,
                             TimeStamp at, const AlarmState::Pending& pending,
                             std::vector<AgentMessage>& out) {
  auto emit = [&](const std::string& to, Predicate content) {
    AgentMessage m;
    m.performative = Performative::INFORM;
    m.sender = self;
    m.receiver = to;
    m.conversation = conversation;
    m.content = std::move(content);
    out.push_back(std::move(m));
  };
  const auto tuple = close_pending(at, pending);
  ++state.tuples_closed;
  emit(cfg.db_agent, StoreTuple{tuple});
  for (auto& alarm : fat_evaluate(cfg.thresholds, tuple)) {
    emit(cfg.dist_agent, RaiseAlarm{std::move(alarm)});
  }
  if (cfg.ica_tree) {
    const auto feats = assemble_custom_event_features(tuple);
    const auto pred = predict(*cfg.ica_tree, feats);
    if (cfg.ica_tree->class_values[static_cast<std::size_t>(pred.klass)] == "alarm") {
      Alarm a;
      a.kind = AlarmKind::custom;
      a.at = at;
      a.channel = ChannelId::O3;
      a.rule_id = "ica:" + cfg.ica_model_id;
      a.severity = Severity::warning;
      a.message = "custom ozone event detected";
      ++state.custom_alarms;
      emit(cfg.dist_agent, RaiseAlarm{std::move(a)});
    }
  }
}

}  // namespace detail

/// Tuple assembly plus the three completion activities, emitted in a fixed
/// order (store, formal alarms, custom alarm) so deterministic runs replay
/// bit-for-bit.
inline std::vector<AgentMessage> alarm_handle(AlarmState& state, const AlarmConfig& cfg,
                                              const std::string& self,
                                              const AgentMessage& msg,
                                              std::uint64_t conversation) {
  std::vector<AgentMessage> out;

  if (msg.performative == Performative::INFORM &&
      std::holds_alternative<SendMeasurement>(msg.content)) {
    const auto& sm = std::get<SendMeasurement>(msg.content);
    const auto at = sm.at;

    // Watermark: a newer timestamp closes every older pending tuple.
    while (cfg.watermark && !state.pending.empty() && state.pending.begin()->first < at) {
      auto it = state.pending.begin();
      detail::tuple_activities(state, cfg, self, conversation, it->first, it->second, out);
      state.pending.erase(it);
    }

    auto& pending = state.pending[at];
    const auto ci = channel_index(sm.measurement.base.channel);
    if (pending.entries[ci]) {
      ++state.duplicate_entries;  // keep the first entry
    } else {
      pending.entries[ci] = sm.measurement;
      ++pending.filled;
    }
    if (pending.filled == static_cast<int>(kChannelCount)) {
      detail::tuple_activities(state, cfg, self, conversation, at, pending, out);
      state.pending.erase(at);
    }
    return out;
  }

  if (msg.performative == Performative::INFORM &&
      std::holds_alternative<SensorMalfunction>(msg.content)) {
    const auto& sm = std::get<SensorMalfunction>(msg.content);
    Alarm a;
    a.kind = AlarmKind::malfunction;
    a.at = sm.at;
    a.channel = sm.channel;
    a.rule_id = "sensor-malfunction";
    a.severity = Severity::warning;
    a.message = std::string(channel_name(sm.channel)) + " sensor malfunction: " +
                std::to_string(sm.consecutive_invalid) + " consecutive invalid readings";
    AgentMessage m;
    m.performative = Performative::INFORM;
    m.sender = self;
    m.receiver = cfg.dist_agent;
    m.conversation = conversation;
    m.content = RaiseAlarm{std::move(a)};
    out.push_back(std::move(m));
    return out;
  }

  if (msg.performative == Performative::FAILURE ||
      msg.performative == Performative::NOT_UNDERSTOOD) {
    return out;  // counted at the bus; nothing to do here
  }

  AgentMessage reply;
  reply.performative = Performative::NOT_UNDERSTOOD;
  reply.sender = self;
  reply.receiver = msg.sender;
  reply.conversation = msg.conversation;
  reply.content = NotUnderstood{msg.conversation};
  out.push_back(std::move(reply));
  return out;
}

/// Ages pending tuples during idle rounds; those past the timeout close with
/// placeholders and complete=false.
inline std::vector<AgentMessage> alarm_idle(AlarmState& state, const AlarmConfig& cfg,
                                            const std::string& self,
                                            std::uint64_t conversation) {
  std::vector<AgentMessage> out;
  std::vector<TimeStamp> expired;
  for (auto& [at, pending] : state.pending) {
    if (++pending.idle_age >= cfg.timeout_idle_steps) expired.push_back(at);
  }
  for (const auto at : expired) {
    detail::tuple_activities(state, cfg, self, conversation, at, state.pending.at(at), out);
    state.pending.erase(at);
  }
  return out;
}

class AlarmAgent : public Agent {
 public:
  explicit AlarmAgent(AlarmConfig cfg) : cfg_(std::move(cfg)) {}

  const std::string& id() const override { return id_; }

  void handle(const AgentMessage& msg, Bus& bus) override {
    for (auto& m : alarm_handle(state_, cfg_, id_, msg, msg.conversation)) {
      bus.send(std::move(m));
    }
  }

  bool on_idle(Bus& bus) override {
    for (auto& m : alarm_idle(state_, cfg_, id_, bus.new_conversation())) {
      bus.send(std::move(m));
    }
    return !state_.pending.empty();
  }

  const AlarmState& state() const { return state_; }

 private:
  AlarmConfig cfg_;
  AlarmState state_;
  std::string id_ = "alarm";
};

// ---- database ----------------------------------------------------------------

/// Append-only tuple sink. Implementations must flush on every append.
class TupleSink {
 public:
  virtual ~TupleSink() = default;
  virtual bool append(const MeasurementTuple& tuple) = 0;
};

inline std::string tuple_store_header() {
  std::string h = "timestamp,complete";
  for (const auto c : kAllChannels) {
    const std::string name(channel_name(c));
    for (const char* col : {"value", "tag", "level", "trend", "persistence", "estimated"}) {
      h += "," + name + "_" + col;
    }
  }
  return h;
}

inline std::string tuple_store_row(const MeasurementTuple& tuple) {
  std::string row = format_iso8601(tuple.at);
  row += tuple.complete ? ",1" : ",0";
  for (const auto& e : tuple.entries) {
    row += ',';
    if (e.base.value) row += detail::format_double(*e.base.value);
    row += ',';
    row += tag_code(e.tag);
    row += ',';
    if (e.level) row += to_string(*e.level);
    row += ',';
    if (e.trend) row += to_string(*e.trend);
    row += ',';
    row += std::to_string(e.persistence);
    row += ',';
    row += e.estimated ? '1' : '0';
  }
  return row;
}

class CsvTupleStore : public TupleSink {
 public:
  explicit CsvTupleStore(const std::string& path) : out_(path, std::ios::trunc) {
    if (out_) {
      out_ << tuple_store_header() << '\n';
      out_.flush();
    }
  }

  bool ok() const { return static_cast<bool>(out_); }

  bool append(const MeasurementTuple& tuple) override {
    if (!out_) return false;
    out_ << tuple_store_row(tuple) << '\n';
    out_.flush();
    return static_cast<bool>(out_);
  }

 private:
  std::ofstream out_;
};

class DatabaseAgent : public Agent {
 public:
  explicit DatabaseAgent(TupleSink& sink) : sink_(sink) {}

  const std::string& id() const override { return id_; }

  void handle(const AgentMessage& msg, Bus& bus) override {
    if (msg.performative == Performative::INFORM &&
        std::holds_alternative<StoreTuple>(msg.content)) {
      const auto& tuple = std::get<StoreTuple>(msg.content).tuple;
      if (sink_.append(tuple)) {
        ++stored_;
        return;
      }
      ++retries_;
      if (sink_.append(tuple)) {  // single retry
        ++stored_;
        return;
      }
      ++dropped_;
      AgentMessage failure;
      failure.performative = Performative::FAILURE;
      failure.sender = id_;
      failure.receiver = msg.sender;
      failure.conversation = msg.conversation;
      failure.content =
          FailureNotice{"tuple store write failed at " + format_iso8601(tuple.at)};
      bus.send(std::move(failure));
      return;
    }
    if (msg.performative == Performative::FAILURE ||
        msg.performative == Performative::NOT_UNDERSTOOD) {
      return;
    }
    AgentMessage reply;
    reply.performative = Performative::NOT_UNDERSTOOD;
    reply.sender = id_;
    reply.receiver = msg.sender;
    reply.conversation = msg.conversation;
    reply.content = NotUnderstood{msg.conversation};
    bus.send(std::move(reply));
  }

  std::uint64_t stored() const { return stored_; }
  std::uint64_t retries() const { return retries_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  TupleSink& sink_;
  std::uint64_t stored_ = 0;
  std::uint64_t retries_ = 0;
  std::uint64_t dropped_ = 0;
  std::string id_ = "db";
};

// ---- distribution --------------------------------------------------------------

/// Matches an alarm against a profile: kind first, then channel (an alarm
/// without a channel matches any channel subscription).
inline bool profile_matches(const UserProfile& profile, const Alarm& alarm) {
  if (!profile.subscribed_kinds.contains(alarm.kind)) return false;
  if (!alarm.channel) return true;
  if (profile.all_channels) return true;
  return profile.subscribed_channels.contains(*alarm.channel);
}

inline std::string render_alert(const Alarm& alarm, const UserProfile& profile) {
  const std::string channel =
      alarm.channel ? std::string(channel_name(*alarm.channel)) : std::string("-");
  if (profile.medium == Medium::email) {
    std::string text = "[AQ] ";
    text += to_string(alarm.severity);
    text += " ";
    text += to_string(alarm.kind);
    text += " alarm for ";
    text += profile.address;
    text += ": ";
    text += alarm.message;
    text += " (channel=" + channel + ", at=" + format_iso8601(alarm.at) +
            ", rule=" + alarm.rule_id + ")";
    return text;
  }
  std::string text = "AQ ";
  text += to_string(alarm.severity);
  text += " ";
  text += to_string(alarm.kind);
  text += " " + channel + " " + format_iso8601(alarm.at) + " " + alarm.message;
  if (text.size() > 160) text.resize(160);  // SMS budget
  return text;
}

struct DistributionState {
  std::set<std::string> seen;  // (alarm identity, user) pairs
  std::uint64_t alarms_formal = 0;
  std::uint64_t alarms_custom = 0;
  std::uint64_t alarms_malfunction = 0;
  std::uint64_t undelivered = 0;
  std::uint64_t duplicates_suppressed = 0;
};

/// Profile-matched alert fan-out for one alarm; the seen-set guarantees one
/// alert per (alarm, user) pair across the run.
inline std::vector<Alert> dist_route(const std::vector<UserProfile>& profiles,
                                     const Alarm& alarm, DistributionState& state) {
  std::vector<Alert> alerts;
  const auto identity = alarm_identity(alarm);
  for (const auto& profile : profiles) {
    if (!profile_matches(profile, alarm)) continue;
    const auto key = identity + "|" + profile.user_id;
    if (!state.seen.insert(key).second) {
      ++state.duplicates_suppressed;
      continue;
    }
    Alert alert;
    alert.alarm = alarm;
    alert.recipient = profile.user_id;
    alert.medium = profile.medium;
    alert.rendered = render_alert(alarm, profile);
    alerts.push_back(std::move(alert));
  }
  if (alerts.empty()) ++state.undelivered;
  return alerts;
}

/// One JSON line per alert, as written to the outbox files.
inline std::string alert_jsonl(const Alert& alert) {
  std::string out = "{";
  jsonl::append_field(out, "at", format_iso8601(alert.alarm.at));
  out += ',';
  jsonl::append_field(out, "kind", to_string(alert.alarm.kind));
  out += ',';
  jsonl::append_field(out, "channel",
                      alert.alarm.channel ? std::string(channel_name(*alert.alarm.channel))
                                          : std::string("null"),
                      alert.alarm.channel.has_value());
  out += ',';
  jsonl::append_field(out, "rule_id", alert.alarm.rule_id);
  out += ',';
  jsonl::append_field(out, "severity", to_string(alert.alarm.severity));
  out += ',';
  jsonl::append_field(out, "recipient", alert.recipient);
  out += ',';
  jsonl::append_field(out, "rendered", alert.rendered);
  out += '}';
  return out;
}

class DistributionAgent : public Agent {
 public:
  DistributionAgent(std::vector<UserProfile> profiles, std::ostream* email_outbox,
                    std::ostream* sms_outbox)
      : profiles_(std::move(profiles)), email_(email_outbox), sms_(sms_outbox) {}

  const std::string& id() const override { return id_; }

  void handle(const AgentMessage& msg, Bus& bus) override {
    if (msg.performative == Performative::INFORM &&
        std::holds_alternative<RaiseAlarm>(msg.content)) {
      const auto& alarm = std::get<RaiseAlarm>(msg.content).alarm;
      switch (alarm.kind) {
        case AlarmKind::formal: ++state_.alarms_formal; break;
        case AlarmKind::custom: ++state_.alarms_custom; break;
        case AlarmKind::malfunction: ++state_.alarms_malfunction; break;
      }
      for (const auto& alert : dist_route(profiles_, alarm, state_)) {
        auto* sink = alert.medium == Medium::email ? email_ : sms_;
        if (sink) {
          *sink << alert_jsonl(alert) << '\n';
          sink->flush();
        }
        if (alert.medium == Medium::email) {
          ++alerts_email_;
        } else {
          ++alerts_sms_;
        }
      }
      return;
    }
    if (msg.performative == Performative::FAILURE ||
        msg.performative == Performative::NOT_UNDERSTOOD) {
      return;
    }
    AgentMessage reply;
    reply.performative = Performative::NOT_UNDERSTOOD;
    reply.sender = id_;
    reply.receiver = msg.sender;
    reply.conversation = msg.conversation;
    reply.content = NotUnderstood{msg.conversation};
    bus.send(std::move(reply));
  }

  const DistributionState& state() const { return state_; }
  std::uint64_t alerts_email() const { return alerts_email_; }
  std::uint64_t alerts_sms() const { return alerts_sms_; }

 private:
  std::vector<UserProfile> profiles_;
  std::ostream* email_;
  std::ostream* sms_;
  DistributionState state_;
  std::uint64_t alerts_email_ = 0;
  std::uint64_t alerts_sms_ = 0;
  std::string id_ = "dist";
};

/// Absorbs replies addressed to the sensor boundary (NOT-UNDERSTOOD bounces,
/// FAILUREs to the replayer).
class IngressAgent : public Agent {
 public:
  const std::string& id() const override { return id_; }
  void handle(const AgentMessage& msg, Bus&) override {
    if (msg.performative == Performative::FAILURE) ++failures_seen_;
  }
  std::uint64_t failures_seen() const { return failures_seen_; }

 private:
  std::uint64_t failures_seen_ = 0;
  std::string id_ = "ingress";
};

}  // namespace aqpipe
