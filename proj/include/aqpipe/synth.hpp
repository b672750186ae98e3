#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "aqpipe/rng.hpp"
#include "aqpipe/station_log.hpp"

namespace aqpipe {

enum class FaultKind : std::uint8_t { spike, stuck, dropout, drift };

inline std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::spike: return "spike";
    case FaultKind::stuck: return "stuck";
    case FaultKind::dropout: return "dropout";
    default: return "drift";
  }
}

/// Diurnal sinusoid plus Gaussian noise, per channel.
struct ChannelSignal {
  double mean = 0.0;
  double amplitude = 0.0;
  double period_s = 86400.0;
  double phase = 0.0;
  double noise_sigma = 1.0;
};

struct SyntheticConfig {
  std::uint64_t seed = 42;
  std::size_t n_records = 0;
  double fault_rate = 0.0;  // target fraction of invalid samples, in [0,1]
  std::set<FaultKind> fault_kinds = {FaultKind::spike, FaultKind::stuck,
                                     FaultKind::dropout, FaultKind::drift};
  TimeStamp start = timestamp_from_civil(2000, 1, 1);
  std::int64_t sampling_interval = kDefaultSamplingIntervalS;
  PerChannel<ChannelSignal> signals = default_signals();

  static PerChannel<ChannelSignal> default_signals() {
    PerChannel<ChannelSignal> s{};
    // mean, amplitude, period, phase, noise sigma — engineering units per channel
    s[channel_index(ChannelId::SO2)] = {8.0, 3.0, 86400.0, 1.1, 0.8};
    s[channel_index(ChannelId::O3)] = {70.0, 60.0, 86400.0, 0.0, 4.0};
    s[channel_index(ChannelId::NO)] = {10.0, 6.0, 86400.0, 2.3, 1.0};
    s[channel_index(ChannelId::NO2)] = {25.0, 12.0, 86400.0, 2.9, 2.0};
    s[channel_index(ChannelId::NOX)] = {35.0, 16.0, 86400.0, 2.7, 3.0};
    s[channel_index(ChannelId::VEL)] = {3.0, 1.5, 86400.0, 4.0, 0.4};
    s[channel_index(ChannelId::DIR)] = {180.0, 80.0, 86400.0, 5.1, 10.0};
    s[channel_index(ChannelId::TEM)] = {18.0, 8.0, 86400.0, 0.2, 0.7};
    s[channel_index(ChannelId::HR)] = {55.0, 20.0, 86400.0, 3.3, 3.0};
    s[channel_index(ChannelId::RAD)] = {250.0, 200.0, 86400.0, 0.1, 20.0};
    s[channel_index(ChannelId::PRE)] = {1013.0, 4.0, 86400.0, 1.9, 0.8};
    return s;
  }
};

/// Ground truth kept alongside the corrupted observations: the uncorrupted
/// value for every sample, and the fault kind behind every invalid tag.
struct SyntheticSeries {
  std::vector<StationLogRecord> records;            // observed values + tags
  std::vector<PerChannel<double>> true_values;      // uncorrupted, per record
  std::vector<PerChannel<std::optional<FaultKind>>> faults;
};

namespace detail {

struct FaultState {
  FaultKind kind = FaultKind::spike;
  int remaining = 0;
  double held = 0.0;   // stuck
  double offset = 0.0; // drift accumulator
  double slope = 0.0;
};

inline double mean_fault_duration(const std::set<FaultKind>& kinds) {
  double total = 0.0;
  for (const auto k : kinds) {
    total += (k == FaultKind::stuck || k == FaultKind::drift) ? 10.0 : 1.0;
  }
  return kinds.empty() ? 1.0 : total / static_cast<double>(kinds.size());
}

}  // namespace detail

/// Deterministic generator: the same config yields byte-identical output.
/// Faults occur in runs (stuck/drift span several samples); the start
/// probability is scaled so the invalid-sample fraction tracks fault_rate.
inline SyntheticSeries synthesize_series(const SyntheticConfig& cfg) {
  if (cfg.fault_rate < 0.0 || cfg.fault_rate > 1.0) {
    throw std::invalid_argument("fault_rate must be in [0,1]");
  }
  if (cfg.n_records == 0) {
    throw std::invalid_argument("n_records must be > 0");
  }
  SyntheticSeries out;
  out.records.reserve(cfg.n_records);
  out.true_values.reserve(cfg.n_records);
  out.faults.reserve(cfg.n_records);

  Rng rng(cfg.seed);
  const std::vector<FaultKind> kinds(cfg.fault_kinds.begin(), cfg.fault_kinds.end());
  const double start_p =
      kinds.empty() ? 0.0
                    : std::min(1.0, cfg.fault_rate / detail::mean_fault_duration(cfg.fault_kinds));
  PerChannel<detail::FaultState> active{};
  PerChannel<bool> has_active{};
  PerChannel<std::optional<double>> last_observed{};

  for (std::size_t i = 0; i < cfg.n_records; ++i) {
    StationLogRecord rec;
    rec.at = cfg.start + static_cast<std::int64_t>(i) * cfg.sampling_interval;
    PerChannel<double> truth{};
    PerChannel<std::optional<FaultKind>> fault_row{};

    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const auto& sig = cfg.signals[c];
      const double t = static_cast<double>(rec.at % static_cast<std::int64_t>(sig.period_s));
      const double clean =
          sig.mean +
          sig.amplitude * std::sin(2.0 * 3.141592653589793 * t / sig.period_s + sig.phase) +
          rng.gaussian(0.0, sig.noise_sigma);
      truth[c] = clean;

      if (!has_active[c] && start_p > 0.0 && rng.uniform() < start_p) {
        detail::FaultState fs;
        fs.kind = kinds[static_cast<std::size_t>(rng.uniform_int(
            0, static_cast<std::int64_t>(kinds.size()) - 1))];
        switch (fs.kind) {
          case FaultKind::spike:
            fs.remaining = 1;
            break;
          case FaultKind::dropout:
            fs.remaining = 1;
            break;
          case FaultKind::stuck:
            fs.remaining = static_cast<int>(rng.uniform_int(6, 14));
            fs.held = last_observed[c].value_or(clean);
            break;
          case FaultKind::drift:
            fs.remaining = static_cast<int>(rng.uniform_int(6, 14));
            fs.slope = rng.uniform(8.0, 20.0) * (sig.noise_sigma > 0 ? sig.noise_sigma / 4.0 : 1.0);
            fs.offset = 0.0;
            break;
        }
        active[c] = fs;
        has_active[c] = true;
      }

      if (has_active[c]) {
        auto& fs = active[c];
        rec.tags[c] = ValidationTag::invalid;
        fault_row[c] = fs.kind;
        switch (fs.kind) {
          case FaultKind::spike:
            rec.values[c] = clean * rng.uniform(3.0, 6.0);
            break;
          case FaultKind::dropout:
            rec.values[c] = std::nullopt;
            break;
          case FaultKind::stuck:
            rec.values[c] = fs.held;
            break;
          case FaultKind::drift:
            fs.offset += fs.slope;
            rec.values[c] = clean + fs.offset;
            break;
        }
        if (--fs.remaining <= 0) has_active[c] = false;
      } else {
        rec.values[c] = clean;
        rec.tags[c] = ValidationTag::valid;
      }
      last_observed[c] = rec.values[c] ? rec.values[c] : last_observed[c];
    }

    out.records.push_back(std::move(rec));
    out.true_values.push_back(truth);
    out.faults.push_back(fault_row);
  }
  return out;
}

/// The ground-truth companion series: uncorrupted values, every tag valid.
inline std::vector<StationLogRecord> truth_records(const SyntheticSeries& s) {
  std::vector<StationLogRecord> out;
  out.reserve(s.records.size());
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    StationLogRecord rec;
    rec.at = s.records[i].at;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      rec.values[c] = s.true_values[i][c];
      rec.tags[c] = ValidationTag::valid;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace aqpipe
