#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aqpipe/agents.hpp"
#include "aqpipe/model_io.hpp"

namespace aqpipe {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelPaths {
  std::string imv;
  std::string mve;
};

enum class SchedulerMode { deterministic, concurrent };

/// Everything the operator can tune, with desk-scale defaults. Flags override
/// file keys; file keys override these defaults.
struct Config {
  std::int64_t sampling_interval_s = kDefaultSamplingIntervalS;
  double trend_epsilon = 0.5;
  int trend_window = 3;
  int malfunction_k = 4;
  int assembly_timeout_idle_steps = 2;
  SchedulerMode scheduler = SchedulerMode::deterministic;

  PerChannel<LevelBins> level_bins = default_level_bins();
  PerChannel<SanityRange> sanity_ranges = default_sanity_ranges();
  std::vector<ThresholdRule> fat_thresholds = default_fat_thresholds();
  PerChannel<ModelPaths> model_paths{};
  std::string ica_model_path;
  bool require_o3_models = true;
  std::vector<UserProfile> profiles;

  std::string store_path = "tuples.csv";
  std::string email_outbox_path = "email.outbox.jsonl";
  std::string sms_outbox_path = "sms.outbox.jsonl";
  std::string message_log_path;  // empty disables the message log

  static PerChannel<LevelBins> default_level_bins() {
    PerChannel<LevelBins> b{};
    b[channel_index(ChannelId::SO2)] = {20, 50};
    b[channel_index(ChannelId::O3)] = {60, 120};
    b[channel_index(ChannelId::NO)] = {15, 30};
    b[channel_index(ChannelId::NO2)] = {40, 90};
    b[channel_index(ChannelId::NOX)] = {50, 110};
    b[channel_index(ChannelId::VEL)] = {2.5, 5};
    b[channel_index(ChannelId::DIR)] = {120, 240};
    b[channel_index(ChannelId::TEM)] = {12, 24};
    b[channel_index(ChannelId::HR)] = {40, 70};
    b[channel_index(ChannelId::RAD)] = {150, 400};
    b[channel_index(ChannelId::PRE)] = {1008, 1018};
    return b;
  }

  static PerChannel<SanityRange> default_sanity_ranges() {
    PerChannel<SanityRange> r{};
    r[channel_index(ChannelId::SO2)] = {0, 400};
    r[channel_index(ChannelId::O3)] = {0, 400};
    r[channel_index(ChannelId::NO)] = {0, 400};
    r[channel_index(ChannelId::NO2)] = {0, 400};
    r[channel_index(ChannelId::NOX)] = {0, 600};
    r[channel_index(ChannelId::VEL)] = {0, 60};
    r[channel_index(ChannelId::DIR)] = {0, 360};
    r[channel_index(ChannelId::TEM)] = {-30, 55};
    r[channel_index(ChannelId::HR)] = {0, 100};
    r[channel_index(ChannelId::RAD)] = {0, 1500};
    r[channel_index(ChannelId::PRE)] = {850, 1100};
    return r;
  }

  static std::vector<ThresholdRule> default_fat_thresholds() {
    return {
        {"O3-info-180", ChannelId::O3, 180.0, Severity::info,
         "ozone above the information threshold (180 ug/m3)"},
        {"O3-alert-240", ChannelId::O3, 240.0, Severity::alert,
         "ozone above the alert threshold (240 ug/m3)"},
    };
  }

  const LevelBins& bins(ChannelId c) const { return level_bins[channel_index(c)]; }
};

namespace detail {

inline void load_profiles(const nlohmann::json& j, std::vector<UserProfile>& out) {
  for (const auto& jp : j) {
    UserProfile p;
    p.user_id = jp.at("user_id").get<std::string>();
    for (const auto& k : jp.at("kinds")) {
      const auto kind = parse_alarm_kind(k.get<std::string>());
      if (!kind) throw ConfigError("profile " + p.user_id + ": unknown alarm kind");
      p.subscribed_kinds.insert(*kind);
    }
    const auto& channels = jp.at("channels");
    if (channels.is_string() && channels.get<std::string>() == "all") {
      p.all_channels = true;
    } else if (channels.is_array()) {
      p.all_channels = false;
      for (const auto& c : channels) {
        p.subscribed_channels.insert(require_channel(c.get<std::string>()));
      }
    } else {
      throw ConfigError("profile " + p.user_id + ": channels must be \"all\" or a list");
    }
    const auto medium = parse_medium(jp.at("medium").get<std::string>());
    if (!medium) throw ConfigError("profile " + p.user_id + ": unknown medium");
    p.medium = *medium;
    p.address = jp.value("address", p.user_id);
    out.push_back(std::move(p));
  }
}

}  // namespace detail

inline Config parse_config(const nlohmann::json& j) {
  Config cfg;
  cfg.sampling_interval_s = j.value("sampling_interval_s", cfg.sampling_interval_s);
  cfg.trend_epsilon = j.value("trend_epsilon", cfg.trend_epsilon);
  cfg.trend_window = j.value("trend_window", cfg.trend_window);
  cfg.malfunction_k = j.value("malfunction_k", cfg.malfunction_k);
  cfg.assembly_timeout_idle_steps =
      j.value("assembly_timeout_idle_steps", cfg.assembly_timeout_idle_steps);
  if (j.contains("scheduler")) {
    const auto s = j["scheduler"].get<std::string>();
    if (s == "det" || s == "deterministic") {
      cfg.scheduler = SchedulerMode::deterministic;
    } else if (s == "conc" || s == "concurrent") {
      cfg.scheduler = SchedulerMode::concurrent;
    } else {
      throw ConfigError("unknown scheduler mode: " + s);
    }
  }
  if (j.contains("level_bins")) {
    for (const auto& [name, bins] : j["level_bins"].items()) {
      const auto c = require_channel(name);
      cfg.level_bins[channel_index(c)] = {bins.at("lo").get<double>(),
                                          bins.at("hi").get<double>()};
    }
  }
  if (j.contains("sanity_ranges")) {
    for (const auto& [name, range] : j["sanity_ranges"].items()) {
      const auto c = require_channel(name);
      cfg.sanity_ranges[channel_index(c)] = {range.at("min").get<double>(),
                                             range.at("max").get<double>()};
    }
  }
  if (j.contains("fat_thresholds")) {
    cfg.fat_thresholds.clear();
    for (const auto& jt : j["fat_thresholds"]) {
      ThresholdRule rule;
      rule.id = jt.at("id").get<std::string>();
      rule.channel = require_channel(jt.at("channel").get<std::string>());
      rule.threshold = jt.at("threshold").get<double>();
      const auto sev = parse_severity(jt.value("severity", "info"));
      if (!sev) throw ConfigError("threshold " + rule.id + ": unknown severity");
      rule.severity = *sev;
      rule.message = jt.value("message", rule.id + " exceeded");
      cfg.fat_thresholds.push_back(std::move(rule));
    }
  }
  if (j.contains("models")) {
    for (const auto& [name, paths] : j["models"].items()) {
      const auto c = require_channel(name);
      auto& mp = cfg.model_paths[channel_index(c)];
      mp.imv = paths.value("imv", "");
      mp.mve = paths.value("mve", "");
    }
  }
  cfg.ica_model_path = j.value("ica_model", cfg.ica_model_path);
  cfg.require_o3_models = j.value("require_o3_models", cfg.require_o3_models);
  if (j.contains("profiles")) detail::load_profiles(j["profiles"], cfg.profiles);
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    cfg.store_path = p.value("store", cfg.store_path);
    cfg.email_outbox_path = p.value("email_outbox", cfg.email_outbox_path);
    cfg.sms_outbox_path = p.value("sms_outbox", cfg.sms_outbox_path);
    cfg.message_log_path = p.value("message_log", cfg.message_log_path);
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Models referenced by the config, loaded and schema-checked at startup.
struct LoadedModels {
  PerChannel<std::shared_ptr<const DecisionTree>> imv{};
  PerChannel<std::shared_ptr<const RuleSet>> imv_rules{};
  PerChannel<std::shared_ptr<const DecisionTree>> mve{};
  std::shared_ptr<const DecisionTree> ica;
  std::string ica_model_id = "ica";
};

inline LoadedModels load_models(const Config& cfg) {
  LoadedModels models;
  for (const auto c : kAllChannels) {
    const auto& paths = cfg.model_paths[channel_index(c)];
    if (!paths.imv.empty()) {
      auto doc = load_model_file(paths.imv);
      if (doc.role != "IMV") {
        throw ConfigError(paths.imv + ": expected role IMV, found " + doc.role);
      }
      if (doc.tree.feature_names != validation_feature_names(c)) {
        throw ConfigError(paths.imv + ": feature schema does not match channel " +
                          std::string(channel_name(c)));
      }
      auto tree = std::make_shared<DecisionTree>(std::move(doc.tree));
      models.imv[channel_index(c)] = tree;
      models.imv_rules[channel_index(c)] = std::make_shared<RuleSet>(compile_rules(*tree));
    }
    if (!paths.mve.empty()) {
      auto doc = load_model_file(paths.mve);
      if (doc.role != "MVE") {
        throw ConfigError(paths.mve + ": expected role MVE, found " + doc.role);
      }
      if (doc.tree.feature_names != estimation_feature_names(c)) {
        throw ConfigError(paths.mve + ": feature schema does not match channel " +
                          std::string(channel_name(c)));
      }
      models.mve[channel_index(c)] = std::make_shared<DecisionTree>(std::move(doc.tree));
    }
  }
  if (!cfg.ica_model_path.empty()) {
    auto doc = load_model_file(cfg.ica_model_path);
    if (doc.role != "ICA") {
      throw ConfigError(cfg.ica_model_path + ": expected role ICA, found " + doc.role);
    }
    if (doc.tree.feature_names != custom_event_feature_names()) {
      throw ConfigError(cfg.ica_model_path + ": feature schema mismatch");
    }
    models.ica = std::make_shared<DecisionTree>(std::move(doc.tree));
    models.ica_model_id = doc.model_id;
  }
  const auto o3 = channel_index(ChannelId::O3);
  if (cfg.require_o3_models && (!models.imv[o3] || !models.mve[o3])) {
    throw ConfigError("O3 requires both IMV and MVE models (set require_o3_models=false "
                      "to fall back to range sanity)");
  }
  return models;
}

}  // namespace aqpipe
