#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqpipe/pipeline.hpp"
#include "aqpipe/report.hpp"

namespace aqpipe::cli {

namespace detail {

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct SplitSpec {
  bool by_year = false;
  double fraction = 0.5;
};

inline SplitSpec parse_split(const std::string& text) {
  if (text == "year") return {true, 0.0};
  SplitSpec s;
  try {
    s.fraction = std::stod(text);
  } catch (const std::exception&) {
    throw std::runtime_error("bad --split value (expected 'year' or a fraction): " + text);
  }
  if (s.fraction <= 0.0 || s.fraction >= 1.0) {
    throw std::runtime_error("--split fraction must be in (0,1)");
  }
  return s;
}

inline std::pair<std::vector<StationLogRecord>, std::vector<StationLogRecord>> split_records(
    const std::vector<StationLogRecord>& records, const SplitSpec& split) {
  if (records.empty()) throw std::runtime_error("no records to split");
  std::vector<StationLogRecord> train, test;
  if (split.by_year) {
    const auto first_year = year_of(records.front().at);
    for (const auto& r : records) {
      (year_of(r.at) == first_year ? train : test).push_back(r);
    }
  } else {
    const auto cut = static_cast<std::size_t>(
        static_cast<double>(records.size()) * split.fraction);
    train.assign(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(cut));
    test.assign(records.begin() + static_cast<std::ptrdiff_t>(cut), records.end());
  }
  if (train.empty()) throw std::runtime_error("split produces empty training set");
  if (test.empty()) throw std::runtime_error("split produces empty test set");
  return {std::move(train), std::move(test)};
}

inline std::vector<std::optional<double>> channel_values(
    const std::vector<StationLogRecord>& records, ChannelId c) {
  std::vector<std::optional<double>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.values[channel_index(c)]);
  return out;
}

inline std::vector<std::optional<ValidationTag>> channel_tags(
    const std::vector<StationLogRecord>& records, ChannelId c) {
  std::vector<std::optional<ValidationTag>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.tags[channel_index(c)]);
  return out;
}

inline Dataset role_dataset(const std::string& role, ChannelId channel,
                            const std::vector<StationLogRecord>& records,
                            const Config& cfg,
                            const std::vector<StationLogRecord>* truth) {
  if (role == "imv") {
    return build_validation_dataset(channel_values(records, channel),
                                    channel_tags(records, channel), channel);
  }
  if (role == "mve") {
    return build_estimation_dataset(records, channel, cfg.bins(channel), truth);
  }
  if (role == "ica") {
    return build_custom_event_dataset(records, cfg.bins(ChannelId::O3), cfg.trend_epsilon,
                                      cfg.trend_window);
  }
  throw std::runtime_error("unknown role: " + role);
}

}  // namespace detail

struct CommonOptions {
  std::string config_path;

  Config load() const {
    return config_path.empty() ? Config{} : load_config(config_path);
  }
};

inline int cmd_synth(const CommonOptions& common, std::uint64_t seed, std::size_t records,
                     double fault_rate, const std::string& out_path) {
  const auto cfg = common.load();
  SyntheticConfig sc;
  sc.seed = seed;
  sc.n_records = records;
  sc.fault_rate = fault_rate;
  sc.sampling_interval = cfg.sampling_interval_s;
  if (records == 0) {
    const std::string header =
        std::string(kLogHeader) + std::string(kLogTagHeader) + "\n";
    detail::write_text_file(out_path, header);
    detail::write_text_file(out_path + ".truth.csv", header);
    std::cout << "wrote " << out_path << " (0 records)\n";
    return 0;
  }
  const auto series = synthesize_series(sc);
  detail::write_text_file(out_path, serialize_station_log(series.records, true));
  detail::write_text_file(out_path + ".truth.csv",
                          serialize_station_log(truth_records(series), true));
  std::uint64_t invalid = 0, cells = 0;
  for (const auto& rec : series.records) {
    for (const auto& tag : rec.tags) {
      ++cells;
      if (tag && *tag == ValidationTag::invalid) ++invalid;
    }
  }
  std::cout << "wrote " << out_path << " (" << series.records.size()
            << " records, invalid cells " << invalid << "/" << cells << ")\n";
  return 0;
}

inline int cmd_train(const CommonOptions& common, const std::string& input,
                     const std::string& role, const std::string& channel_name_arg,
                     const std::string& split_text, const std::string& out_path,
                     std::uint64_t seed, std::string truth_path) {
  const auto cfg = common.load();
  const auto channel = require_channel(channel_name_arg);
  const auto split = detail::parse_split(split_text);

  const auto text = detail::read_text_file(input);
  auto parsed = parse_station_log(text, cfg.sampling_interval_s);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  if (!parsed.labeled) throw std::runtime_error(input + ": training needs a labeled log");

  std::vector<StationLogRecord> truth;
  const std::vector<StationLogRecord>* truth_ptr = nullptr;
  if (role == "mve") {
    if (truth_path.empty()) {
      const auto candidate = input + ".truth.csv";
      if (std::filesystem::exists(candidate)) truth_path = candidate;
    }
    if (!truth_path.empty()) {
      auto truth_parsed =
          parse_station_log(detail::read_text_file(truth_path), cfg.sampling_interval_s);
      truth = std::move(truth_parsed.records);
      if (truth.size() != parsed.records.size()) {
        throw std::runtime_error("truth series length does not match input");
      }
      truth_ptr = &truth;
    }
  }

  auto [train_records, test_records] = detail::split_records(parsed.records, split);
  std::vector<StationLogRecord> truth_train, truth_test;
  const std::vector<StationLogRecord>*train_truth_ptr = nullptr, *test_truth_ptr = nullptr;
  if (truth_ptr) {
    auto [tt, tv] = detail::split_records(truth, split);
    truth_train = std::move(tt);
    truth_test = std::move(tv);
    train_truth_ptr = &truth_train;
    test_truth_ptr = &truth_test;
  }

  const auto train_data = detail::role_dataset(role, channel, train_records, cfg, train_truth_ptr);
  const auto test_data = detail::role_dataset(role, channel, test_records, cfg, test_truth_ptr);
  if (train_data.rows.empty()) throw std::runtime_error("training portion yields no rows");
  if (train_data.distinct_labels() < 2) {
    throw std::runtime_error("degenerate labels: training portion has a single class");
  }
  if (test_data.rows.empty()) throw std::runtime_error("split produces empty test set");

  const auto unpruned = grow_tree(train_data);
  const auto tree = prune(unpruned);
  const auto ev = evaluate(tree, test_data);

  ModelDocument doc;
  doc.tree = tree;
  doc.role = role == "imv" ? "IMV" : role == "mve" ? "MVE" : "ICA";
  std::uint64_t h = fnv1a64(text.data(), text.size());
  h = fnv1a64(role.data(), role.size(), h);
  h = fnv1a64(split_text.data(), split_text.size(), h);
  doc.config_hash = detail::hex64(h);
  doc.seed = seed;
  doc.model_id = doc.role + "-" + std::string(channel_name(channel)) + "-" +
                 doc.config_hash.substr(0, 8);

  std::string path = out_path;
  if (!path.ends_with(kModelFileExtension)) path += kModelFileExtension;
  save_model_file(doc, path);

  std::cout << "model=" << path << "\n";
  std::cout << "train_rows=" << train_data.rows.size()
            << " test_rows=" << test_data.rows.size() << "\n";
  std::cout << "leaves=" << tree.leaf_count() << " (unpruned "
            << unpruned.leaf_count() << ")\n";
  std::cout << render_evaluation(ev, tree.class_values);
  char pct[32];
  std::snprintf(pct, sizeof(pct), "accuracy_pct=%.2f\n", 100.0 * ev.accuracy);
  std::cout << pct;
  return 0;
}

inline int cmd_run(const CommonOptions& common, const std::string& input,
                   const std::string& mode_override) {
  auto cfg = common.load();
  if (mode_override == "det") {
    cfg.scheduler = SchedulerMode::deterministic;
  } else if (mode_override == "conc") {
    cfg.scheduler = SchedulerMode::concurrent;
  } else if (!mode_override.empty()) {
    throw std::runtime_error("unknown mode: " + mode_override);
  }

  // Startup validation happens before any replay: a bad model file or schema
  // mismatch must fail the run without touching the input.
  const auto models = load_models(cfg);

  auto parsed = parse_station_log(detail::read_text_file(input), cfg.sampling_interval_s);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";

  const auto summary = run_pipeline(cfg, models, parsed.records);
  std::cout << render_summary(summary);
  return summary.clean() ? 0 : 1;
}

inline int cmd_report(const CommonOptions& common) {
  const auto cfg = common.load();
  std::cout << render_report(build_report(cfg));
  return 0;
}

/// Entry point shared by the binary and the tests. args[0] is the program
/// name.
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"air-quality monitoring pipeline"};
  app.require_subcommand(1);

  CommonOptions common;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "config file (JSON)")
        ->envname("AQPIPE_CONFIG");
  };

  // synth
  std::uint64_t seed = 42;
  std::size_t records = 1000;
  double fault_rate = 0.05;
  std::string out_path;
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic station log");
  add_config(synth);
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--records", records, "number of records");
  synth->add_option("--fault-rate", fault_rate, "target invalid-sample fraction");
  synth->add_option("--out", out_path, "output CSV path")->required();

  // train
  std::string train_input, role, channel = "O3", split = "0.5", model_out, truth;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "induce and evaluate a decision model");
  add_config(train);
  train->add_option("input", train_input, "labeled station log CSV")->required();
  train->add_option("--role", role, "imv | mve | ica")->required();
  train->add_option("--channel", channel, "target channel (default O3)");
  train->add_option("--split", split, "'year' or a train fraction in (0,1)");
  train->add_option("--out", model_out, "model output path")->required();
  train->add_option("--seed", train_seed, "seed recorded in provenance");
  train->add_option("--truth", truth, "ground-truth series for mve labels");

  // run
  std::string run_input, mode;
  auto* run = app.add_subcommand("run", "replay a station log through the agent society");
  add_config(run);
  run->add_option("input", run_input, "station log CSV")->required();
  run->add_option("--mode", mode, "det | conc (overrides config)");

  // report
  auto* report = app.add_subcommand("report", "summarize run artifacts");
  add_config(report);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth->parsed()) return cmd_synth(common, seed, records, fault_rate, out_path);
    if (train->parsed()) {
      return cmd_train(common, train_input, role, channel, split, model_out, train_seed,
                       truth);
    }
    if (run->parsed()) return cmd_run(common, run_input, mode);
    if (report->parsed()) return cmd_report(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace aqpipe::cli
