#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include "aqpipe/domain.hpp"

namespace aqpipe {

/// Two cut points per channel; lower cut is inclusive to the upper class:
///   value < lo -> low, lo <= value < hi -> medium, value >= hi -> high.
struct LevelBins {
  double lo = 0.0;
  double hi = 0.0;
};

inline Level qualify_level(double value, const LevelBins& bins) {
  if (!std::isfinite(value)) throw std::domain_error("unqualifiable: non-finite value");
  if (value < bins.lo) return Level::low;
  if (value < bins.hi) return Level::medium;
  return Level::high;
}

/// Trend over a short window of raw values (current sample last). Uses the
/// first and last defined values; fewer than two defined values degrades to
/// steady.
inline Trend qualify_trend(std::span<const std::optional<double>> history,
                           double epsilon) {
  std::optional<double> first, last;
  int defined = 0;
  for (const auto& v : history) {
    if (!v) continue;
    if (!first) first = v;
    last = v;
    ++defined;
  }
  if (defined < 2) return Trend::steady;
  const double delta = *last - *first;
  if (delta > epsilon) return Trend::rising;
  if (-delta > epsilon) return Trend::falling;
  return Trend::steady;
}

/// Consecutive same-level sample counter: increments on repetition, resets to 1
/// on a level change or when there is no predecessor.
inline int update_persistence(const std::optional<QualifiedMeasurement>& previous,
                              Level current_level) {
  if (previous && previous->level && *previous->level == current_level) {
    return previous->persistence + 1;
  }
  return 1;
}

}  // namespace aqpipe
