#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aqpipe {

/// The eleven monitored station channels, in canonical order.
/// This order is load-bearing: tuple layout, CSV columns, tie-breaking
/// and message emission all follow it.
enum class ChannelId : std::uint8_t {
  SO2 = 0,
  O3,
  NO,
  NO2,
  NOX,
  VEL,
  DIR,
  TEM,
  HR,
  RAD,
  PRE,
};

inline constexpr std::size_t kChannelCount = 11;

inline constexpr std::array<ChannelId, kChannelCount> kAllChannels = {
    ChannelId::SO2, ChannelId::O3,  ChannelId::NO,  ChannelId::NO2,
    ChannelId::NOX, ChannelId::VEL, ChannelId::DIR, ChannelId::TEM,
    ChannelId::HR,  ChannelId::RAD, ChannelId::PRE,
};

inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "SO2", "O3", "NO", "NO2", "NOX", "VEL", "DIR", "TEM", "HR", "RAD", "PRE",
};

constexpr std::size_t channel_index(ChannelId c) noexcept {
  return static_cast<std::size_t>(c);
}

constexpr std::string_view channel_name(ChannelId c) noexcept {
  return kChannelNames[channel_index(c)];
}

inline std::optional<ChannelId> parse_channel(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (kChannelNames[i] == name) return kAllChannels[i];
  }
  return std::nullopt;
}

inline ChannelId require_channel(std::string_view name) {
  auto c = parse_channel(name);
  if (!c) throw std::invalid_argument("unknown channel: " + std::string(name));
  return *c;
}

/// Fixed-size per-channel table keyed by canonical order.
template <typename T>
using PerChannel = std::array<T, kChannelCount>;

}  // namespace aqpipe
