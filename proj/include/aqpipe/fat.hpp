#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "aqpipe/domain.hpp"
#include "aqpipe/station_log.hpp"

namespace aqpipe {

/// A configured (not learned) law-style threshold. The comparator is fixed
/// to >= — a measurement exactly at the threshold triggers.
struct ThresholdRule {
  std::string id;
  ChannelId channel = ChannelId::O3;
  double threshold = 0.0;
  Severity severity = Severity::info;
  std::string message;
};

/// Formal alarms over an assembled tuple. Only valid readings can trigger:
/// estimated or invalid entries never fire a law-imposed alarm. Output is
/// ordered by canonical channel, then by rule order within a channel.
inline std::vector<Alarm> fat_evaluate(std::span<const ThresholdRule> thresholds,
                                       const MeasurementTuple& tuple) {
  std::vector<Alarm> alarms;
  std::vector<std::size_t> order(thresholds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return channel_index(thresholds[a].channel) < channel_index(thresholds[b].channel);
  });
  for (const auto i : order) {
    const auto& rule = thresholds[i];
    const auto& entry = tuple.entry(rule.channel);
    if (entry.tag != ValidationTag::valid) continue;
    if (!entry.base.value || *entry.base.value < rule.threshold) continue;
    Alarm a;
    a.kind = AlarmKind::formal;
    a.at = tuple.at;
    a.channel = rule.channel;
    a.rule_id = rule.id;
    a.severity = rule.severity;
    a.message = rule.message + " (value=" + detail::format_double(*entry.base.value) + ")";
    alarms.push_back(std::move(a));
  }
  return alarms;
}

}  // namespace aqpipe
