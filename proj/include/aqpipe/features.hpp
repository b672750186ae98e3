#pragma once

#include <span>
#include <string>
#include <vector>

#include "aqpipe/dataset.hpp"
#include "aqpipe/qualify.hpp"
#include "aqpipe/station_log.hpp"

namespace aqpipe {

// Windows are in samples at the quarter-hourly cadence and include the
// current sample: 30 min = 2 samples back, 90 min = 6 back, the 60 min
// min/max window spans 5 samples, the 150 min window 11.
inline constexpr int kLag30Samples = 2;
inline constexpr int kLag90Samples = 6;
inline constexpr int kMinMax60Samples = 5;
inline constexpr int kMinMax150Samples = 11;
inline constexpr int kValidationHistory = kMinMax150Samples;

inline std::vector<std::string> validation_feature_names(ChannelId channel) {
  const std::string c(channel_name(channel));
  return {c, c + "_30", c + "_90", "MinMax60", "MinMax150"};
}

inline std::vector<std::string> estimation_feature_names(ChannelId channel) {
  std::vector<std::string> names;
  for (const auto other : kAllChannels) {
    if (other != channel) names.emplace_back(channel_name(other));
  }
  const std::string c(channel_name(channel));
  names.push_back(c + "_lag1");
  names.push_back(c + "_lag2");
  return names;
}

inline std::vector<std::string> custom_event_feature_names() {
  std::vector<std::string> names;
  for (const auto c : kAllChannels) names.emplace_back(channel_name(c));
  names.emplace_back("O3_level");
  names.emplace_back("O3_trend");
  return names;
}

inline double encode_level(Level l) { return static_cast<double>(l); }
inline double encode_trend(Trend t) {
  switch (t) {
    case Trend::falling: return -1.0;
    case Trend::steady: return 0.0;
    default: return 1.0;
  }
}

/// Features over the last kValidationHistory observations of one channel,
/// current sample last. A lag is absent when that sample is absent; a min/max
/// window is absent unless every sample in it is defined, mirroring how the
/// training rows are built.
inline std::vector<std::optional<double>> assemble_validation_features(
    std::span<const std::optional<double>> window) {
  const auto n = static_cast<int>(window.size());
  auto lag = [&](int back) -> std::optional<double> {
    const int i = n - 1 - back;
    if (i < 0) return std::nullopt;
    return window[static_cast<std::size_t>(i)];
  };
  auto min_max = [&](int span) -> std::optional<double> {
    if (n < span) return std::nullopt;
    double lo = 0.0, hi = 0.0;
    for (int i = n - span; i < n; ++i) {
      const auto& v = window[static_cast<std::size_t>(i)];
      if (!v) return std::nullopt;
      if (i == n - span || *v < lo) lo = *v;
      if (i == n - span || *v > hi) hi = *v;
    }
    return hi - lo;
  };
  return {lag(0), lag(kLag30Samples), lag(kLag90Samples), min_max(kMinMax60Samples),
          min_max(kMinMax150Samples)};
}

inline std::span<const std::optional<double>> window_view(
    std::span<const std::optional<double>> values, int t, int span) {
  const int start = t - (span - 1);
  return values.subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(span));
}

/// Builds the measurement-validation dataset for one channel from a labeled
/// series. A sample yields a row only when its full history window is defined
/// and it carries a tag; shorter series produce an empty dataset.
inline Dataset build_validation_dataset(std::span<const std::optional<double>> values,
                                        std::span<const std::optional<ValidationTag>> tags,
                                        ChannelId channel) {
  Dataset data;
  data.feature_names = validation_feature_names(channel);
  data.class_name = std::string(channel_name(channel)) + "val";
  data.class_values = {"valid", "invalid"};
  const auto n = static_cast<int>(values.size());
  for (int t = kValidationHistory - 1; t < n; ++t) {
    if (!tags[static_cast<std::size_t>(t)]) continue;
    bool full = true;
    for (int i = t - (kValidationHistory - 1); i <= t; ++i) {
      if (!values[static_cast<std::size_t>(i)]) {
        full = false;
        break;
      }
    }
    if (!full) continue;
    auto feats = assemble_validation_features(
        window_view(values, t, kValidationHistory));
    data.add_row(std::move(feats),
                 *tags[static_cast<std::size_t>(t)] == ValidationTag::valid ? 0 : 1);
  }
  return data;
}

/// Builds the missing-value-estimation dataset: the label is the qualitative
/// level of the channel's true value; predictors are the other channels'
/// concurrent observations plus the channel's last two valid readings. When
/// no ground-truth series is supplied, only rows with a valid observation
/// (where observed == true) are usable.
inline Dataset build_estimation_dataset(const std::vector<StationLogRecord>& records,
                                        ChannelId channel, const LevelBins& bins,
                                        const std::vector<StationLogRecord>* truth = nullptr) {
  Dataset data;
  data.feature_names = estimation_feature_names(channel);
  data.class_name = std::string(channel_name(channel)) + "level";
  data.class_values = {"low", "medium", "high"};
  if (records.size() < static_cast<std::size_t>(kValidationHistory)) return data;
  const auto ci = channel_index(channel);

  std::optional<double> lag1, lag2;
  for (std::size_t t = 0; t < records.size(); ++t) {
    const auto& rec = records[t];
    std::optional<double> label_value;
    if (truth) {
      if (t < truth->size() && (*truth)[t].values[ci]) label_value = (*truth)[t].values[ci];
    } else if (rec.tags[ci] && *rec.tags[ci] == ValidationTag::valid && rec.values[ci]) {
      label_value = rec.values[ci];
    }
    if (label_value) {
      std::vector<std::optional<double>> feats;
      feats.reserve(kChannelCount + 1);
      for (const auto other : kAllChannels) {
        if (other != channel) feats.push_back(rec.values[channel_index(other)]);
      }
      feats.push_back(lag1);
      feats.push_back(lag2);
      data.add_row(std::move(feats),
                   static_cast<int>(qualify_level(*label_value, bins)));
    }
    if (rec.tags[ci] && *rec.tags[ci] == ValidationTag::valid && rec.values[ci]) {
      lag2 = lag1;
      lag1 = rec.values[ci];
    }
  }
  return data;
}

/// Builds the custom-alarm dataset. The event of interest is a high and
/// rising ozone level; rows use only samples with a valid ozone observation
/// so the label is computable from the log itself.
inline Dataset build_custom_event_dataset(const std::vector<StationLogRecord>& records,
                                          const LevelBins& o3_bins, double trend_epsilon,
                                          int trend_window = 3) {
  Dataset data;
  data.feature_names = custom_event_feature_names();
  data.class_name = "O3event";
  data.class_values = {"none", "alarm"};
  const auto o3 = channel_index(ChannelId::O3);

  std::vector<std::optional<double>> o3_defined;
  for (std::size_t t = 0; t < records.size(); ++t) {
    const auto& rec = records[t];
    if (rec.values[o3]) o3_defined.push_back(rec.values[o3]);
    if (!(rec.tags[o3] && *rec.tags[o3] == ValidationTag::valid && rec.values[o3])) continue;
    if (static_cast<int>(o3_defined.size()) < trend_window) continue;

    std::vector<std::optional<double>> feats;
    feats.reserve(kChannelCount + 2);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const bool usable = rec.tags[c] && *rec.tags[c] == ValidationTag::valid && rec.values[c];
      feats.push_back(usable ? rec.values[c] : std::optional<double>());
    }
    const Level level = qualify_level(*rec.values[o3], o3_bins);
    const Trend trend = qualify_trend(
        std::span<const std::optional<double>>(o3_defined)
            .subspan(o3_defined.size() - static_cast<std::size_t>(trend_window)),
        trend_epsilon);
    feats.push_back(encode_level(level));
    feats.push_back(encode_trend(trend));
    const bool event = level == Level::high && trend == Trend::rising;
    data.add_row(std::move(feats), event ? 1 : 0);
  }
  return data;
}

/// The tuple's feature projection used by the custom-alarm engine at runtime.
inline std::vector<std::optional<double>> assemble_custom_event_features(
    const MeasurementTuple& tuple) {
  std::vector<std::optional<double>> feats;
  feats.reserve(kChannelCount + 2);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto& e = tuple.entries[c];
    const bool usable = e.tag == ValidationTag::valid && e.base.value.has_value();
    feats.push_back(usable ? e.base.value : std::optional<double>());
  }
  const auto& o3 = tuple.entry(ChannelId::O3);
  feats.push_back(o3.level ? std::optional<double>(encode_level(*o3.level))
                           : std::optional<double>());
  feats.push_back(o3.trend ? std::optional<double>(encode_trend(*o3.trend))
                           : std::optional<double>());
  return feats;
}

}  // namespace aqpipe
