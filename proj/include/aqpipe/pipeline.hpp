#pragma once

#include <memory>
#include <vector>

#include "aqpipe/config.hpp"
#include "aqpipe/synth.hpp"

namespace aqpipe {

enum class ReplayMode { batch, paced };

struct ReplaySummary {
  std::uint64_t records = 0;
  std::uint64_t measurement_messages = 0;
  std::uint64_t absent_messages = 0;
  bool aborted = false;
};

/// Feeds records into the society: one message per channel per record, in
/// canonical channel order. In batch mode the virtual clock advances only
/// when the bus has gone idle; paced mode floods the bus and drains at the
/// end.
template <typename BusT>
ReplaySummary replay(const std::vector<StationLogRecord>& records, BusT& bus,
                     ReplayMode mode = ReplayMode::batch,
                     const std::string& sender = "ingress") {
  ReplaySummary summary;
  for (const auto& rec : records) {
    if (bus.closed()) {
      summary.aborted = true;
      return summary;
    }
    for (const auto c : kAllChannels) {
      AgentMessage m;
      m.performative = Performative::INFORM;
      m.sender = sender;
      m.receiver = "diag:" + std::string(channel_name(c));
      m.conversation = bus.new_conversation();
      const auto& value = rec.values[channel_index(c)];
      if (value) {
        m.content = NewMeasurement{c, rec.at, *value};
        ++summary.measurement_messages;
      } else {
        m.content = AbsentNotice{c, rec.at};
        ++summary.absent_messages;
      }
      bus.send(std::move(m));
    }
    ++summary.records;
    if (mode == ReplayMode::batch) {
      if constexpr (requires { bus.run_until_idle(); }) {
        bus.run_until_idle();
      } else {
        bus.quiesce();
      }
    }
  }
  bus.run_to_quiescence();
  return summary;
}

struct RunSummary {
  ReplaySummary replay;
  std::uint64_t tuples_stored = 0;
  std::uint64_t store_retries = 0;
  std::uint64_t store_drops = 0;
  std::uint64_t alarms_formal = 0;
  std::uint64_t alarms_custom = 0;
  std::uint64_t alarms_malfunction = 0;
  std::uint64_t alerts_email = 0;
  std::uint64_t alerts_sms = 0;
  std::uint64_t undelivered = 0;
  std::uint64_t messages_total = 0;
  std::uint64_t failures = 0;
  std::uint64_t not_understood = 0;

  bool clean() const { return failures == 0 && !replay.aborted; }
};

/// The wired society plus the file sinks it writes to. Keep it alive for the
/// duration of a run; summary() reads the agent counters.
class Society {
 public:
  Society(const Config& cfg, const LoadedModels& models) : cfg_(cfg) {
    store_ = std::make_unique<CsvTupleStore>(cfg.store_path);
    if (!store_->ok()) throw ConfigError("cannot open tuple store: " + cfg.store_path);
    email_out_.open(cfg.email_outbox_path, std::ios::trunc);
    sms_out_.open(cfg.sms_outbox_path, std::ios::trunc);
    if (!email_out_ || !sms_out_) throw ConfigError("cannot open outbox files");
    // the message log is a deterministic-mode artifact; a concurrent
    // interleaving has no reproducible order worth recording
    if (!cfg.message_log_path.empty() && cfg.scheduler == SchedulerMode::deterministic) {
      message_log_.open(cfg.message_log_path, std::ios::trunc);
      if (!message_log_) throw ConfigError("cannot open message log");
    }

    if (cfg.scheduler == SchedulerMode::deterministic) {
      bus_ = std::make_unique<DeterministicBus>();
    } else {
      bus_ = std::make_unique<ConcurrentBus>();
    }
    if (message_log_.is_open()) bus_->set_log(&message_log_);

    ingress_ = std::make_unique<IngressAgent>();
    bus_->register_agent(*ingress_);
    for (const auto c : kAllChannels) {
      DiagnosisConfig dc;
      dc.channel = c;
      dc.bins = cfg.bins(c);
      dc.trend_epsilon = cfg.trend_epsilon;
      dc.trend_window = cfg.trend_window;
      dc.malfunction_k = cfg.malfunction_k;
      dc.sanity = cfg.sanity_ranges[channel_index(c)];
      dc.imv_tree = models.imv[channel_index(c)];
      dc.imv_rules = models.imv_rules[channel_index(c)];
      dc.mve_tree = models.mve[channel_index(c)];
      diagnosis_.push_back(std::make_unique<DiagnosisAgent>(std::move(dc)));
      bus_->register_agent(*diagnosis_.back());
    }
    AlarmConfig ac;
    ac.thresholds = cfg.fat_thresholds;
    ac.ica_tree = models.ica;
    ac.ica_model_id = models.ica_model_id;
    ac.timeout_idle_steps = cfg.assembly_timeout_idle_steps;
    ac.watermark = cfg.scheduler == SchedulerMode::deterministic;
    alarm_ = std::make_unique<AlarmAgent>(std::move(ac));
    bus_->register_agent(*alarm_);
    db_ = std::make_unique<DatabaseAgent>(*store_);
    bus_->register_agent(*db_);
    dist_ = std::make_unique<DistributionAgent>(cfg.profiles, &email_out_, &sms_out_);
    bus_->register_agent(*dist_);

    if (cfg.scheduler == SchedulerMode::concurrent) {
      static_cast<ConcurrentBus*>(bus_.get())->start();
    }
  }

  ReplaySummary run(const std::vector<StationLogRecord>& records, ReplayMode mode) {
    ReplaySummary rs;
    if (cfg_.scheduler == SchedulerMode::deterministic) {
      rs = replay(records, static_cast<DeterministicBus&>(*bus_), mode);
    } else {
      rs = replay(records, static_cast<ConcurrentBus&>(*bus_), mode);
      static_cast<ConcurrentBus*>(bus_.get())->close();
    }
    last_replay_ = rs;
    return rs;
  }

  RunSummary summary() const {
    RunSummary s;
    s.replay = last_replay_;
    s.tuples_stored = db_->stored();
    s.store_retries = db_->retries();
    s.store_drops = db_->dropped();
    s.alarms_formal = dist_->state().alarms_formal;
    s.alarms_custom = dist_->state().alarms_custom;
    s.alarms_malfunction = dist_->state().alarms_malfunction;
    s.alerts_email = dist_->alerts_email();
    s.alerts_sms = dist_->alerts_sms();
    s.undelivered = dist_->state().undelivered;
    s.messages_total = bus_->messages_sent();
    s.failures = bus_->failures();
    s.not_understood = bus_->not_understood();
    return s;
  }

  Bus& bus() { return *bus_; }
  const AlarmAgent& alarm_agent() const { return *alarm_; }
  const DistributionAgent& dist_agent() const { return *dist_; }

 private:
  Config cfg_;
  std::unique_ptr<CsvTupleStore> store_;
  std::ofstream email_out_, sms_out_, message_log_;
  std::unique_ptr<Bus> bus_;
  std::unique_ptr<IngressAgent> ingress_;
  std::vector<std::unique_ptr<DiagnosisAgent>> diagnosis_;
  std::unique_ptr<AlarmAgent> alarm_;
  std::unique_ptr<DatabaseAgent> db_;
  std::unique_ptr<DistributionAgent> dist_;
  ReplaySummary last_replay_;
};

/// End-to-end run: wire the society, replay the records, flush everything.
inline RunSummary run_pipeline(const Config& cfg, const LoadedModels& models,
                               const std::vector<StationLogRecord>& records) {
  Society society(cfg, models);
  const auto mode = cfg.scheduler == SchedulerMode::deterministic ? ReplayMode::batch
                                                                  : ReplayMode::paced;
  society.run(records, mode);
  return society.summary();
}

inline std::string render_summary(const RunSummary& s) {
  std::string out;
  out += "records=" + std::to_string(s.replay.records) + "\n";
  out += "messages=" + std::to_string(s.messages_total) + "\n";
  out += "tuples_stored=" + std::to_string(s.tuples_stored) + "\n";
  out += "alarms_formal=" + std::to_string(s.alarms_formal) + "\n";
  out += "alarms_custom=" + std::to_string(s.alarms_custom) + "\n";
  out += "alarms_malfunction=" + std::to_string(s.alarms_malfunction) + "\n";
  out += "alerts_email=" + std::to_string(s.alerts_email) + "\n";
  out += "alerts_sms=" + std::to_string(s.alerts_sms) + "\n";
  out += "undelivered=" + std::to_string(s.undelivered) + "\n";
  out += "failures=" + std::to_string(s.failures) + "\n";
  if (s.replay.aborted) out += "aborted=1\n";
  return out;
}

}  // namespace aqpipe
