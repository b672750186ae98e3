#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aqpipe/dataset.hpp"
#include "aqpipe/tree.hpp"

namespace testing {

// ---- scratch directories ------------------------------------------------------

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("aqpipe-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- independent split oracle ---------------------------------------------------
// A from-scratch enumeration of every (feature, midpoint) candidate under the
// same selection convention as the implementation. Kept deliberately naive.

struct OracleCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double split_info = 0.0;
  double ratio = 0.0;
  bool usable = false;
};

inline double oracle_entropy(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

inline OracleCandidate oracle_candidate(const aqpipe::Dataset& data, int feature,
                                        double threshold, int min_leaf) {
  OracleCandidate cand;
  cand.feature = feature;
  cand.threshold = threshold;
  const std::size_t k = data.class_values.size();
  std::vector<double> left(k, 0.0), right(k, 0.0);
  double w_all = 0.0, w_missing = 0.0;
  for (const auto& row : data.rows) {
    w_all += 1.0;
    const auto& v = row.features[static_cast<std::size_t>(feature)];
    if (!v) {
      w_missing += 1.0;
      continue;
    }
    auto& side = (*v <= threshold) ? left : right;
    side[static_cast<std::size_t>(row.label)] += 1.0;
  }
  double w_left = 0.0, w_right = 0.0;
  for (double c : left) w_left += c;
  for (double c : right) w_right += c;
  const double w_known = w_left + w_right;
  if (w_left <= 1e-9 || w_right <= 1e-9) {
    cand.usable = false;
    cand.split_info = 0.0;
    return cand;
  }
  std::vector<double> known(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) known[i] = left[i] + right[i];
  const double h_known = oracle_entropy(known);
  const double h_sides =
      (w_left / w_known) * oracle_entropy(left) + (w_right / w_known) * oracle_entropy(right);
  const double defined_fraction = w_known / w_all;
  cand.gain = defined_fraction * (h_known - h_sides);
  if (cand.gain < 0.0) cand.gain = 0.0;
  double si = 0.0;
  for (const double w : {w_left, w_right, w_missing}) {
    if (w <= 0.0) continue;
    const double p = w / w_all;
    si -= p * std::log2(p);
  }
  cand.split_info = si;
  cand.usable = si > 0.0 && w_left + 1e-9 >= min_leaf && w_right + 1e-9 >= min_leaf;
  cand.ratio = cand.usable ? cand.gain / cand.split_info : 0.0;
  return cand;
}

inline std::vector<OracleCandidate> oracle_all_candidates(const aqpipe::Dataset& data,
                                                          int min_leaf) {
  std::vector<OracleCandidate> out;
  for (int f = 0; f < static_cast<int>(data.feature_count()); ++f) {
    std::vector<double> values;
    for (const auto& row : data.rows) {
      const auto& v = row.features[static_cast<std::size_t>(f)];
      if (v) values.push_back(*v);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double mid = values[i] + (values[i + 1] - values[i]) / 2.0;
      out.push_back(oracle_candidate(data, f, mid, min_leaf));
    }
  }
  return out;
}

inline std::optional<OracleCandidate> oracle_best_split(const aqpipe::Dataset& data,
                                                        int min_leaf) {
  const auto all = oracle_all_candidates(data, min_leaf);
  std::vector<OracleCandidate> usable;
  for (const auto& c : all) {
    if (c.usable) usable.push_back(c);
  }
  if (usable.empty()) return std::nullopt;
  double mean = 0.0;
  for (const auto& c : usable) mean += c.gain;
  mean /= static_cast<double>(usable.size());
  std::optional<OracleCandidate> best;
  for (const auto& c : usable) {
    if (c.gain + 1e-12 < mean) continue;
    if (!best || c.ratio > best->ratio) best = c;
  }
  return best;
}

// ---- independent pessimistic bound ----------------------------------------------
// Bisection on the exact binomial CDF for integer error counts.

inline double binomial_cdf(int e, int n, double p) {
  double total = 0.0;
  for (int k = 0; k <= e; ++k) {
    double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n - k + 1.0);
    log_term += k * std::log(p) + (n - k) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return total;
}

inline double bisect_upper_error(int errors, int n, double confidence) {
  if (errors >= n) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = (lo + hi) / 2.0;
    if (mid <= 0.0 || mid >= 1.0) break;
    if (binomial_cdf(errors, n, mid) > confidence) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2.0;
}

// ---- random instances -----------------------------------------------------------

inline aqpipe::Dataset random_dataset(std::mt19937& rng, int max_rows = 12,
                                      int n_features = 3, double missing_rate = 0.1) {
  aqpipe::Dataset data;
  for (int f = 0; f < n_features; ++f) data.feature_names.push_back("f" + std::to_string(f));
  data.class_name = "cls";
  data.class_values = {"a", "b"};
  std::uniform_int_distribution<int> rows_dist(2, max_rows);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, 1);
  const int n = rows_dist(rng);
  for (int i = 0; i < n; ++i) {
    std::vector<std::optional<double>> feats;
    for (int f = 0; f < n_features; ++f) {
      if (unit(rng) < missing_rate) {
        feats.emplace_back();
      } else {
        // quantized values so exact ties between rows actually happen
        feats.emplace_back(std::round(value(rng) * 2.0) / 2.0);
      }
    }
    data.add_row(std::move(feats), label(rng));
  }
  return data;
}

/// Random well-formed tree over d features; thresholds and leaf supports are
/// arbitrary but child indices are valid preorder.
inline aqpipe::DecisionTree random_tree(std::mt19937& rng, int n_features = 4,
                                        int n_classes = 3, int max_depth = 5) {
  aqpipe::DecisionTree tree;
  for (int f = 0; f < n_features; ++f) tree.feature_names.push_back("f" + std::to_string(f));
  tree.class_name = "cls";
  for (int k = 0; k < n_classes; ++k) tree.class_values.push_back("c" + std::to_string(k));

  std::uniform_real_distribution<double> threshold(0.0, 10.0);
  std::uniform_real_distribution<double> support(0.0, 20.0);
  std::uniform_int_distribution<int> feature(0, n_features - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // recursive build into preorder vector
  const std::function<int(int)> build = [&](int depth) -> int {
    const bool leaf = depth >= max_depth || unit(rng) < 0.35;
    if (leaf) {
      aqpipe::TreeNode node;
      node.counts.resize(static_cast<std::size_t>(n_classes));
      for (auto& c : node.counts) c = support(rng);
      node.klass = 0;
      for (int k = 1; k < n_classes; ++k) {
        if (node.counts[static_cast<std::size_t>(k)] >
            node.counts[static_cast<std::size_t>(node.klass)]) {
          node.klass = k;
        }
      }
      tree.nodes.push_back(std::move(node));
      return static_cast<int>(tree.nodes.size() - 1);
    }
    aqpipe::TreeNode node;
    node.feature = feature(rng);
    node.threshold = threshold(rng);
    const int self = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(node));
    const int left = build(depth + 1);
    const int right = build(depth + 1);
    auto& n = tree.nodes[static_cast<std::size_t>(self)];
    n.left = left;
    n.right = right;
    n.counts.resize(static_cast<std::size_t>(n_classes));
    for (int k = 0; k < n_classes; ++k) {
      n.counts[static_cast<std::size_t>(k)] =
          tree.nodes[static_cast<std::size_t>(left)].counts[static_cast<std::size_t>(k)] +
          tree.nodes[static_cast<std::size_t>(right)].counts[static_cast<std::size_t>(k)];
    }
    return self;
  };
  build(0);
  return tree;
}

}  // namespace testing
