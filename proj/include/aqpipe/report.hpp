#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqpipe/agents.hpp"
#include "aqpipe/config.hpp"

namespace aqpipe {

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChannelStats {
  std::uint64_t total = 0;
  std::uint64_t invalid = 0;
  std::uint64_t estimated = 0;
};

struct RunReport {
  std::uint64_t tuples = 0;
  std::uint64_t complete = 0;
  PerChannel<ChannelStats> channels{};

  struct TimelineEntry {
    std::string at;
    std::string kind;
    std::string channel;
    std::string severity;
    std::string rule_id;
    int recipients = 0;
  };
  std::vector<TimelineEntry> timeline;
  std::uint64_t malfunction_episodes = 0;
};

namespace detail {

inline void scan_tuple_store(const std::string& path, RunReport& report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("missing run artifact: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ReportError(path + ": empty store");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != tuple_store_header()) throw ReportError(path + ": unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2 + 6 * kChannelCount) {
      throw ReportError(path + ": malformed row");
    }
    ++report.tuples;
    if (cells[1] == "1") ++report.complete;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      auto& stats = report.channels[c];
      ++stats.total;
      const auto tag = cells[2 + 6 * c + 1];
      const auto estimated = cells[2 + 6 * c + 5];
      if (tag == "I") ++stats.invalid;
      if (estimated == "1") ++stats.estimated;
    }
  }
}

inline void scan_outbox(const std::string& path,
                        std::map<std::string, RunReport::TimelineEntry>& by_identity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("missing run artifact: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ReportError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
    RunReport::TimelineEntry entry;
    entry.at = j.value("at", "");
    entry.kind = j.value("kind", "");
    entry.channel = j.contains("channel") && j["channel"].is_string()
                        ? j["channel"].get<std::string>()
                        : "-";
    entry.severity = j.value("severity", "");
    entry.rule_id = j.value("rule_id", "");
    const auto identity = entry.kind + "|" + entry.at + "|" + entry.channel + "|" +
                          entry.rule_id;
    auto [it, inserted] = by_identity.try_emplace(identity, entry);
    ++it->second.recipients;
  }
}

}  // namespace detail

/// Aggregates the run artifacts (tuple store + outboxes) into one report.
/// Purely derived: nothing is mutated.
inline RunReport build_report(const Config& cfg) {
  RunReport report;
  detail::scan_tuple_store(cfg.store_path, report);
  std::map<std::string, RunReport::TimelineEntry> by_identity;
  detail::scan_outbox(cfg.email_outbox_path, by_identity);
  detail::scan_outbox(cfg.sms_outbox_path, by_identity);
  for (auto& [identity, entry] : by_identity) {
    if (entry.kind == "malfunction") ++report.malfunction_episodes;
    report.timeline.push_back(entry);
  }
  std::stable_sort(report.timeline.begin(), report.timeline.end(),
                   [](const auto& a, const auto& b) { return a.at < b.at; });
  return report;
}

inline std::string render_report(const RunReport& r) {
  std::ostringstream out;
  out << "== run report ==\n";
  out << "tuples=" << r.tuples << " complete=" << r.complete
      << " incomplete=" << (r.tuples - r.complete) << "\n";
  out << "invalid rates per channel:\n";
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const auto& s = r.channels[c];
    const double rate = s.total ? 100.0 * static_cast<double>(s.invalid) /
                                      static_cast<double>(s.total)
                                : 0.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %-4s %llu/%llu (%.2f%%) estimated=%llu\n",
                  std::string(kChannelNames[c]).c_str(),
                  static_cast<unsigned long long>(s.invalid),
                  static_cast<unsigned long long>(s.total), rate,
                  static_cast<unsigned long long>(s.estimated));
    out << buf;
  }
  out << "alarm timeline (" << r.timeline.size() << "):\n";
  for (const auto& e : r.timeline) {
    out << "  " << e.at << " " << e.kind << " " << e.channel << " " << e.severity
        << " " << e.rule_id << " recipients=" << e.recipients << "\n";
  }
  out << "malfunction episodes=" << r.malfunction_episodes << "\n";
  return out.str();
}

}  // namespace aqpipe
