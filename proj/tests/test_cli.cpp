#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "aqpipe/cli.hpp"
#include "helpers.hpp"

using namespace aqpipe;
using testing::TempDir;
using testing::slurp;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "aqpipe");
  return cli::run_cli(std::move(args));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Minimal config with no mandatory models and quiet thresholds.
std::string basic_config_json(const TempDir& dir, const std::string& extra = "") {
  return std::string("{\n") +
         "  \"require_o3_models\": false,\n"
         "  \"paths\": {\n"
         "    \"store\": \"" + dir.file("tuples.csv") + "\",\n"
         "    \"email_outbox\": \"" + dir.file("email.outbox.jsonl") + "\",\n"
         "    \"sms_outbox\": \"" + dir.file("sms.outbox.jsonl") + "\",\n"
         "    \"message_log\": \"" + dir.file("messages.jsonl") + "\"\n"
         "  },\n"
         "  \"profiles\": [\n"
         "    {\"user_id\": \"ops\", \"kinds\": [\"formal\", \"custom\", \"malfunction\"],\n"
         "     \"channels\": \"all\", \"medium\": \"email\", \"address\": \"ops@x\"}\n"
         "  ]" + extra + "\n}\n";
}

/// A clean constant-valued log: every channel well inside its sanity range.
std::string constant_log(int n, double o3 = 70.0) {
  std::vector<StationLogRecord> records;
  TimeStamp at = timestamp_from_civil(2000, 1, 1);
  for (int i = 0; i < n; ++i) {
    StationLogRecord rec;
    rec.at = at;
    at += kDefaultSamplingIntervalS;
    const double values[kChannelCount] = {8, o3, 10, 25, 35, 3, 180, 18, 55, 250, 1013};
    for (std::size_t c = 0; c < kChannelCount; ++c) rec.values[c] = values[c];
    records.push_back(rec);
  }
  return serialize_station_log(records, false);
}

}  // namespace

TEST_CASE("cli: synth is deterministic and writes the truth sidecar") {
  TempDir dir("synth");
  REQUIRE(run({"synth", "--seed", "42", "--records", "500", "--fault-rate", "0.05",
               "--out", dir.file("a.csv")}) == 0);
  REQUIRE(run({"synth", "--seed", "42", "--records", "500", "--fault-rate", "0.05",
               "--out", dir.file("b.csv")}) == 0);
  const auto a = slurp(dir.file("a.csv"));
  REQUIRE_FALSE(a.empty());
  CHECK(a == slurp(dir.file("b.csv")));
  CHECK(slurp(dir.file("a.csv.truth.csv")) == slurp(dir.file("b.csv.truth.csv")));

  // the main file parses as a labeled log; the sidecar is all-valid
  const auto parsed = parse_station_log(a);
  CHECK(parsed.labeled);
  CHECK(parsed.records.size() == 500);
  const auto truth = parse_station_log(slurp(dir.file("a.csv.truth.csv")));
  for (const auto& rec : truth.records) {
    for (const auto& tag : rec.tags) CHECK(tag == ValidationTag::valid);
  }
}

TEST_CASE("cli: synth with zero records writes a header-only file") {
  TempDir dir("synth0");
  REQUIRE(run({"synth", "--records", "0", "--out", dir.file("empty.csv")}) == 0);
  const auto text = slurp(dir.file("empty.csv"));
  CHECK(text == std::string(kLogHeader) + std::string(kLogTagHeader) + "\n");
}

TEST_CASE("cli: synth fault rate shows up in the emitted tags") {
  TempDir dir("synthfr");
  REQUIRE(run({"synth", "--seed", "11", "--records", "2000", "--fault-rate", "0.05",
               "--out", dir.file("f.csv")}) == 0);
  const auto parsed = parse_station_log(slurp(dir.file("f.csv")));
  std::uint64_t invalid = 0, total = 0;
  for (const auto& rec : parsed.records) {
    for (const auto& tag : rec.tags) {
      ++total;
      if (tag == ValidationTag::invalid) ++invalid;
    }
  }
  const double rate = static_cast<double>(invalid) / static_cast<double>(total);
  CHECK(rate > 0.03);
  CHECK(rate < 0.075);
}

TEST_CASE("cli: train writes an importable model and prints the report") {
  TempDir dir("train");
  REQUIRE(run({"synth", "--seed", "42", "--records", "3000", "--fault-rate", "0.05",
               "--out", dir.file("data.csv")}) == 0);
  REQUIRE(run({"train", dir.file("data.csv"), "--role", "imv", "--split", "0.5", "--out",
               dir.file("imv"), "--seed", "42"}) == 0);
  const auto doc = load_model_file(dir.file("imv") + std::string(kModelFileExtension));
  CHECK(doc.role == "IMV");
  CHECK(doc.seed == 42);
  CHECK(doc.tree.feature_names == validation_feature_names(ChannelId::O3));
  CHECK(doc.tree.leaf_count() >= 2);
}

TEST_CASE("cli: train mve uses the truth sidecar automatically") {
  TempDir dir("mve");
  REQUIRE(run({"synth", "--seed", "7", "--records", "2000", "--fault-rate", "0.05",
               "--out", dir.file("data.csv")}) == 0);
  REQUIRE(run({"train", dir.file("data.csv"), "--role", "mve", "--split", "0.5", "--out",
               dir.file("mve")}) == 0);
  const auto doc = load_model_file(dir.file("mve") + std::string(kModelFileExtension));
  CHECK(doc.role == "MVE");
  CHECK(doc.tree.feature_names == estimation_feature_names(ChannelId::O3));
}

TEST_CASE("cli: train ica") {
  TempDir dir("ica");
  REQUIRE(run({"synth", "--seed", "21", "--records", "4000", "--fault-rate", "0.02",
               "--out", dir.file("data.csv")}) == 0);
  REQUIRE(run({"train", dir.file("data.csv"), "--role", "ica", "--split", "0.5", "--out",
               dir.file("ica")}) == 0);
  const auto doc = load_model_file(dir.file("ica") + std::string(kModelFileExtension));
  CHECK(doc.role == "ICA");
  CHECK(doc.tree.class_values == std::vector<std::string>{"none", "alarm"});
}

TEST_CASE("cli: train rejects degenerate labels") {
  TempDir dir("degenerate");
  REQUIRE(run({"synth", "--seed", "5", "--records", "400", "--fault-rate", "0",
               "--out", dir.file("clean.csv")}) == 0);
  CHECK(run({"train", dir.file("clean.csv"), "--role", "imv", "--split", "0.5", "--out",
             dir.file("m")}) == 1);
}

TEST_CASE("cli: year split needs data spanning two years") {
  TempDir dir("year");
  REQUIRE(run({"synth", "--seed", "5", "--records", "1000", "--fault-rate", "0.05",
               "--out", dir.file("short.csv")}) == 0);
  CHECK(run({"train", dir.file("short.csv"), "--role", "imv", "--split", "year", "--out",
             dir.file("m")}) == 1);
}

TEST_CASE("cli: run on a clean log stores every tuple and fires nothing") {
  TempDir dir("runclean");
  write_file(dir.file("config.json"), basic_config_json(dir));
  write_file(dir.file("input.csv"), constant_log(50));
  REQUIRE(run({"run", dir.file("input.csv"), "--config", dir.file("config.json")}) == 0);

  const auto store = slurp(dir.file("tuples.csv"));
  CHECK(std::count(store.begin(), store.end(), '\n') == 51);  // header + 50 rows
  CHECK(slurp(dir.file("email.outbox.jsonl")).empty());
  CHECK(slurp(dir.file("sms.outbox.jsonl")).empty());
}

TEST_CASE("cli: a single exceedance produces exactly one formal alarm") {
  TempDir dir("runalarm");
  write_file(dir.file("config.json"), basic_config_json(dir));
  // one O3 sample at 185: above the 180 info threshold, below 240
  auto parsed = parse_station_log(constant_log(30));
  parsed.records[15].values[channel_index(ChannelId::O3)] = 185.0;
  write_file(dir.file("input.csv"), serialize_station_log(parsed.records, false));

  REQUIRE(run({"run", dir.file("input.csv"), "--config", dir.file("config.json")}) == 0);
  const auto email = slurp(dir.file("email.outbox.jsonl"));
  CHECK(std::count(email.begin(), email.end(), '\n') == 1);
  CHECK(email.find("O3-info-180") != std::string::npos);
}

TEST_CASE("cli: deterministic runs are byte-identical and idempotent on input") {
  TempDir dir_a("runa");
  TempDir dir_b("runb");
  const auto input_text = constant_log(40, 100.0);

  write_file(dir_a.file("config.json"), basic_config_json(dir_a));
  write_file(dir_b.file("config.json"), basic_config_json(dir_b));
  write_file(dir_a.file("input.csv"), input_text);
  write_file(dir_b.file("input.csv"), input_text);

  REQUIRE(run({"run", dir_a.file("input.csv"), "--config", dir_a.file("config.json"),
               "--mode", "det"}) == 0);
  REQUIRE(run({"run", dir_b.file("input.csv"), "--config", dir_b.file("config.json"),
               "--mode", "det"}) == 0);

  CHECK(slurp(dir_a.file("input.csv")) == input_text);  // inputs never mutated
  CHECK(slurp(dir_a.file("tuples.csv")) == slurp(dir_b.file("tuples.csv")));
  CHECK(slurp(dir_a.file("messages.jsonl")) == slurp(dir_b.file("messages.jsonl")));
  CHECK(slurp(dir_a.file("email.outbox.jsonl")) == slurp(dir_b.file("email.outbox.jsonl")));
}

TEST_CASE("cli: concurrent mode completes cleanly and conserves tuples") {
  TempDir dir("runconc");
  auto config = basic_config_json(dir);
  // the message log is a deterministic-mode artifact
  const auto log_key =
      std::string(",\n    \"message_log\": \"") + dir.file("messages.jsonl") + "\"";
  const auto pos = config.find(log_key);
  REQUIRE(pos != std::string::npos);
  config.erase(pos, log_key.size());
  write_file(dir.file("config.json"), config);
  write_file(dir.file("input.csv"), constant_log(60));
  REQUIRE(run({"run", dir.file("input.csv"), "--config", dir.file("config.json"),
               "--mode", "conc"}) == 0);
  const auto store = slurp(dir.file("tuples.csv"));
  CHECK(std::count(store.begin(), store.end(), '\n') == 61);
}

TEST_CASE("cli: year split trains on the first year and tests on the rest") {
  TempDir dir("yearpos");
  // 40000 quarter-hourly records span from 2000 into 2001
  REQUIRE(run({"synth", "--seed", "3", "--records", "40000", "--fault-rate", "0.05",
               "--out", dir.file("data.csv")}) == 0);
  REQUIRE(run({"train", dir.file("data.csv"), "--role", "imv", "--split", "year",
               "--out", dir.file("imv")}) == 0);
  const auto doc = load_model_file(dir.file("imv") + std::string(kModelFileExtension));
  CHECK(doc.role == "IMV");
  CHECK(doc.tree.leaf_count() >= 2);
}

TEST_CASE("cli: run fails before replay when a configured model is broken") {
  TempDir dir("badmodel");
  write_file(dir.file("bogus.aqmodel.json"), "{\"v\": 99}");
  const std::string extra =
      ",\n  \"models\": {\"O3\": {\"imv\": \"" + dir.file("bogus.aqmodel.json") + "\"}}";
  write_file(dir.file("config.json"), basic_config_json(dir, extra));
  write_file(dir.file("input.csv"), constant_log(5));
  CHECK(run({"run", dir.file("input.csv"), "--config", dir.file("config.json")}) != 0);
  // no artifacts were produced
  CHECK(slurp(dir.file("tuples.csv")).empty());
}

TEST_CASE("cli: run honors AQPIPE_CONFIG") {
  TempDir dir("envcfg");
  write_file(dir.file("config.json"), basic_config_json(dir));
  write_file(dir.file("input.csv"), constant_log(5));
  setenv("AQPIPE_CONFIG", dir.file("config.json").c_str(), 1);
  const int rc = run({"run", dir.file("input.csv")});
  unsetenv("AQPIPE_CONFIG");
  REQUIRE(rc == 0);
  CHECK_FALSE(slurp(dir.file("tuples.csv")).empty());
}

TEST_CASE("cli: report aggregates artifacts and matches a recount") {
  TempDir dir("report");
  write_file(dir.file("config.json"), basic_config_json(dir));

  // NO2 goes out of sanity range for three separate streaks of 5
  auto parsed = parse_station_log(constant_log(60));
  const auto no2 = channel_index(ChannelId::NO2);
  for (const int start : {5, 20, 40}) {
    for (int i = start; i < start + 5; ++i) parsed.records[i].values[no2] = 9999.0;
  }
  write_file(dir.file("input.csv"), serialize_station_log(parsed.records, false));
  REQUIRE(run({"run", dir.file("input.csv"), "--config", dir.file("config.json")}) == 0);

  const auto cfg = load_config(dir.file("config.json"));
  const auto report = build_report(cfg);
  CHECK(report.tuples == 60);
  CHECK(report.malfunction_episodes == 3);

  // recount invalid cells straight from the store
  const auto store = slurp(dir.file("tuples.csv"));
  std::istringstream in(store);
  std::string line;
  std::getline(in, line);  // header
  std::uint64_t no2_invalid = 0, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 2 + 6 * no2 + 1; ++i) pos = line.find(',', pos) + 1;
    if (line.compare(pos, 1, "I") == 0) ++no2_invalid;
  }
  CHECK(rows == 60);
  CHECK(report.channels[no2].invalid == no2_invalid);
  CHECK(no2_invalid == 15);

  const auto text = render_report(report);
  CHECK(text.find("malfunction episodes=3") != std::string::npos);
}

TEST_CASE("cli: report with an empty store reports zero counts") {
  TempDir dir("reportempty");
  write_file(dir.file("config.json"), basic_config_json(dir));
  write_file(dir.file("input.csv"), std::string(kLogHeader) + "\n");
  REQUIRE(run({"run", dir.file("input.csv"), "--config", dir.file("config.json")}) == 0);
  const auto report = build_report(load_config(dir.file("config.json")));
  CHECK(report.tuples == 0);
  CHECK(report.timeline.empty());
  CHECK(report.malfunction_episodes == 0);
}

TEST_CASE("cli: report errors on missing artifacts") {
  TempDir dir("reportmissing");
  write_file(dir.file("config.json"), basic_config_json(dir));
  CHECK(run({"report", "--config", dir.file("config.json")}) == 1);
}
