#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "aqpipe/dataset.hpp"

namespace aqpipe {

/// Binary threshold tree. Internal nodes test feature <= threshold (left) vs
/// > threshold (right); every node keeps its per-class training weight so
/// absent-feature prediction and pruning can use support counts.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int klass = -1;  // majority class (meaningful on leaves)
  std::vector<double> counts;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<std::string> feature_names;
  std::string class_name;
  std::vector<std::string> class_values;
  std::vector<TreeNode> nodes;  // preorder, root at 0

  int leaf_count() const {
    int n = 0;
    for (const auto& node : nodes) n += node.is_leaf() ? 1 : 0;
    return n;
  }
  int depth() const { return depth_below(0); }

 private:
  int depth_below(int idx) const {
    const auto& n = nodes[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_below(n.left), depth_below(n.right));
  }
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double split_info = 0.0;
  double gain_ratio = 0.0;
  bool usable = false;
};

struct GrowParams {
  int min_leaf = 2;
  int max_depth = 25;
};

/// Shannon entropy in bits of a (possibly weighted) class distribution.
/// Tolerates the tiny negative counts produced by cancellation of fractional
/// row weights.
inline double entropy(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) {
      if (c < -1e-6) throw std::invalid_argument("negative class count");
      c = 0.0;
    }
    total += c;
  }
  if (total <= 0.0) throw std::invalid_argument("entropy of empty set");
  double h = 0.0;
  for (const double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

namespace detail {

struct WeightedRow {
  int index;
  double weight;
};

constexpr double kWeightEpsilon = 1e-9;

inline std::vector<double> class_weights(const Dataset& data,
                                         std::span<const WeightedRow> rows) {
  std::vector<double> w(data.class_values.size(), 0.0);
  for (const auto& r : rows) {
    w[static_cast<std::size_t>(data.rows[static_cast<std::size_t>(r.index)].label)] +=
        r.weight;
  }
  return w;
}

inline double total_weight(std::span<const double> w) {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

/// Split statistics over one node's weighted rows. Rows with the feature
/// absent are excluded from the gain statistics; the gain is then scaled by
/// the defined fraction and the absent mass appears as a third split-info
/// bucket (the C4.5 missing-value convention).
inline SplitCandidate evaluate_split(const Dataset& data,
                                     std::span<const WeightedRow> rows, int feature,
                                     double threshold, int min_leaf) {
  SplitCandidate cand;
  cand.feature = feature;
  cand.threshold = threshold;

  const std::size_t n_classes = data.class_values.size();
  std::vector<double> left(n_classes, 0.0), right(n_classes, 0.0);
  double w_all = 0.0, w_missing = 0.0;
  for (const auto& r : rows) {
    const auto& row = data.rows[static_cast<std::size_t>(r.index)];
    w_all += r.weight;
    const auto& v = row.features[static_cast<std::size_t>(feature)];
    if (!v) {
      w_missing += r.weight;
      continue;
    }
    auto& side = (*v <= threshold) ? left : right;
    side[static_cast<std::size_t>(row.label)] += r.weight;
  }
  const double w_left = total_weight(left);
  const double w_right = total_weight(right);
  const double w_known = w_left + w_right;
  if (w_left <= kWeightEpsilon || w_right <= kWeightEpsilon) {
    cand.usable = false;
    cand.split_info = 0.0;
    return cand;
  }

  std::vector<double> known(n_classes, 0.0);
  for (std::size_t k = 0; k < n_classes; ++k) known[k] = left[k] + right[k];
  const double h_known = entropy(known);
  const double h_sides =
      (w_left / w_known) * entropy(left) + (w_right / w_known) * entropy(right);
  const double defined_fraction = w_known / w_all;
  cand.gain = defined_fraction * (h_known - h_sides);
  if (cand.gain < 0.0) cand.gain = 0.0;  // clamp float noise

  double si = 0.0;
  for (const double w : {w_left, w_right, w_missing}) {
    if (w <= 0.0) continue;
    const double p = w / w_all;
    si -= p * std::log2(p);
  }
  cand.split_info = si;
  cand.usable = si > 0.0 && w_left + kWeightEpsilon >= min_leaf &&
                w_right + kWeightEpsilon >= min_leaf;
  cand.gain_ratio = cand.usable ? cand.gain / cand.split_info : 0.0;
  return cand;
}

/// All usable candidates for one feature via a single sort-and-sweep: left
/// class weights accumulate across boundaries between distinct values.
inline void feature_candidates(const Dataset& data, std::span<const WeightedRow> rows,
                               int feature, int min_leaf,
                               std::vector<SplitCandidate>& out) {
  struct Known {
    double value;
    int label;
    double weight;
  };
  std::vector<Known> known;
  known.reserve(rows.size());
  const std::size_t n_classes = data.class_values.size();
  std::vector<double> total(n_classes, 0.0);
  double w_all = 0.0;
  for (const auto& r : rows) {
    const auto& row = data.rows[static_cast<std::size_t>(r.index)];
    w_all += r.weight;
    const auto& v = row.features[static_cast<std::size_t>(feature)];
    if (!v) continue;
    known.push_back({*v, row.label, r.weight});
    total[static_cast<std::size_t>(row.label)] += r.weight;
  }
  if (known.size() < 2) return;
  std::sort(known.begin(), known.end(),
            [](const Known& a, const Known& b) { return a.value < b.value; });

  double w_known = 0.0;
  for (const double w : total) w_known += w;
  const double w_missing = w_all - w_known;
  const double h_known = entropy(total);
  const double defined_fraction = w_known / w_all;

  std::vector<double> left(n_classes, 0.0);
  double w_left = 0.0;
  for (std::size_t i = 0; i + 1 < known.size(); ++i) {
    left[static_cast<std::size_t>(known[i].label)] += known[i].weight;
    w_left += known[i].weight;
    if (known[i].value == known[i + 1].value) continue;

    SplitCandidate cand;
    cand.feature = feature;
    cand.threshold = known[i].value + (known[i + 1].value - known[i].value) / 2.0;
    const double w_right = w_known - w_left;
    if (w_left <= kWeightEpsilon || w_right <= kWeightEpsilon) continue;
    std::vector<double> right(n_classes, 0.0);
    for (std::size_t k = 0; k < n_classes; ++k) {
      right[k] = std::max(0.0, total[k] - left[k]);
    }
    const double h_sides =
        (w_left / w_known) * entropy(left) + (w_right / w_known) * entropy(right);
    cand.gain = defined_fraction * (h_known - h_sides);
    if (cand.gain < 0.0) cand.gain = 0.0;
    double si = 0.0;
    for (const double w : {w_left, w_right, w_missing}) {
      if (w <= 0.0) continue;
      const double p = w / w_all;
      si -= p * std::log2(p);
    }
    cand.split_info = si;
    cand.usable = si > 0.0 && w_left + kWeightEpsilon >= min_leaf &&
                  w_right + kWeightEpsilon >= min_leaf;
    cand.gain_ratio = cand.usable ? cand.gain / cand.split_info : 0.0;
    if (cand.usable) out.push_back(cand);
  }
}

/// C4.5 selection: among usable candidates, the best gain ratio subject to
/// gain >= mean gain; ties resolved by feature order, then smaller threshold.
inline std::optional<SplitCandidate> best_split_weighted(const Dataset& data,
                                                         std::span<const WeightedRow> rows,
                                                         int min_leaf) {
  std::vector<SplitCandidate> usable;
  for (int f = 0; f < static_cast<int>(data.feature_count()); ++f) {
    feature_candidates(data, rows, f, min_leaf, usable);
  }
  if (usable.empty()) return std::nullopt;
  double mean_gain = 0.0;
  for (const auto& c : usable) mean_gain += c.gain;
  mean_gain /= static_cast<double>(usable.size());

  const SplitCandidate* best = nullptr;
  for (const auto& c : usable) {
    if (c.gain + 1e-12 < mean_gain) continue;
    if (!best || c.gain_ratio > best->gain_ratio) best = &c;
    // iteration order (feature, then ascending threshold) settles exact ties
  }
  return best ? std::optional<SplitCandidate>(*best) : std::nullopt;
}

inline bool is_pure(const Dataset& data, std::span<const WeightedRow> rows) {
  int label = -1;
  for (const auto& r : rows) {
    if (r.weight <= kWeightEpsilon) continue;
    const int l = data.rows[static_cast<std::size_t>(r.index)].label;
    if (label == -1) {
      label = l;
    } else if (l != label) {
      return false;
    }
  }
  return true;
}

inline int majority_class(std::span<const double> weights) {
  int best = 0;
  for (std::size_t k = 1; k < weights.size(); ++k) {
    if (weights[k] > weights[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

struct Grower {
  const Dataset& data;
  GrowParams params;
  std::vector<TreeNode> nodes;

  int emit_leaf(std::vector<double> weights) {
    TreeNode leaf;
    leaf.klass = majority_class(weights);
    leaf.counts = std::move(weights);
    nodes.push_back(std::move(leaf));
    return static_cast<int>(nodes.size() - 1);
  }

  int grow(std::vector<WeightedRow> rows, int depth) {
    auto weights = class_weights(data, rows);
    if (depth >= params.max_depth || is_pure(data, rows)) {
      return emit_leaf(std::move(weights));
    }
    const auto split = best_split_weighted(data, rows, params.min_leaf);
    if (!split) return emit_leaf(std::move(weights));

    // Partition: defined rows go to their side; rows missing the split
    // feature descend both sides with weight scaled by the side's share of
    // the defined mass.
    std::vector<WeightedRow> left, right;
    double w_left = 0.0, w_right = 0.0;
    for (const auto& r : rows) {
      const auto& v = data.rows[static_cast<std::size_t>(r.index)]
                          .features[static_cast<std::size_t>(split->feature)];
      if (!v) continue;
      if (*v <= split->threshold) {
        w_left += r.weight;
      } else {
        w_right += r.weight;
      }
    }
    const double p_left = w_left / (w_left + w_right);
    for (const auto& r : rows) {
      const auto& v = data.rows[static_cast<std::size_t>(r.index)]
                          .features[static_cast<std::size_t>(split->feature)];
      if (v) {
        (*v <= split->threshold ? left : right).push_back(r);
      } else {
        const double wl = r.weight * p_left;
        const double wr = r.weight * (1.0 - p_left);
        if (wl > kWeightEpsilon) left.push_back({r.index, wl});
        if (wr > kWeightEpsilon) right.push_back({r.index, wr});
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    TreeNode node;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.counts = std::move(weights);
    const int self = static_cast<int>(nodes.size());
    nodes.push_back(std::move(node));
    nodes[static_cast<std::size_t>(self)].left = grow(std::move(left), depth + 1);
    nodes[static_cast<std::size_t>(self)].right = grow(std::move(right), depth + 1);
    return self;
  }
};

}  // namespace detail

/// Split statistics over the full dataset (unit row weights).
inline SplitCandidate gain_ratio(const Dataset& data, int feature, double threshold,
                                 int min_leaf = 1) {
  std::vector<detail::WeightedRow> rows;
  rows.reserve(data.rows.size());
  for (int i = 0; i < static_cast<int>(data.rows.size()); ++i) rows.push_back({i, 1.0});
  return detail::evaluate_split(data, rows, feature, threshold, min_leaf);
}

inline std::optional<SplitCandidate> best_split(const Dataset& data, int min_leaf) {
  std::vector<detail::WeightedRow> rows;
  rows.reserve(data.rows.size());
  for (int i = 0; i < static_cast<int>(data.rows.size()); ++i) rows.push_back({i, 1.0});
  return detail::best_split_weighted(data, rows, min_leaf);
}

inline DecisionTree grow_tree(const Dataset& data, GrowParams params = {}) {
  if (data.rows.empty()) throw std::invalid_argument("cannot grow a tree from an empty dataset");
  for (const auto& r : data.rows) {
    if (r.label < 0 || r.label >= static_cast<int>(data.class_values.size())) {
      throw std::invalid_argument("training row with out-of-range label");
    }
  }
  detail::Grower grower{data, params, {}};
  std::vector<detail::WeightedRow> rows;
  rows.reserve(data.rows.size());
  for (int i = 0; i < static_cast<int>(data.rows.size()); ++i) rows.push_back({i, 1.0});
  grower.grow(std::move(rows), 0);

  DecisionTree tree;
  tree.feature_names = data.feature_names;
  tree.class_name = data.class_name;
  tree.class_values = data.class_values;
  tree.nodes = std::move(grower.nodes);
  return tree;
}

/// Upper confidence limit of the binomial error rate: the largest error
/// probability still consistent (at the given confidence) with observing E
/// errors in N cases. Continuous in E and N so weighted counts work.
inline double pessimistic_error_rate(double errors, double n, double confidence) {
  if (n <= 0.0) return 0.0;
  if (errors >= n) return 1.0;
  if (errors < 0.0) errors = 0.0;
  // P[Bin(N,p) <= E] = I_{1-p}(N-E, E+1) = CF  =>  p = 1 - ibeta_inv(N-E, E+1, CF)
  return 1.0 - boost::math::ibeta_inv(n - errors, errors + 1.0, confidence);
}

namespace detail {

struct PrunedSubtree {
  std::vector<TreeNode> nodes;  // preorder with subtree-local indices
  double predicted_errors = 0.0;
};

inline double leaf_predicted_errors(const std::vector<double>& counts, double confidence) {
  const double n = total_weight(counts);
  if (n <= 0.0) return 0.0;
  const double errs = n - counts[static_cast<std::size_t>(majority_class(counts))];
  return n * pessimistic_error_rate(errs, n, confidence);
}

inline PrunedSubtree prune_rec(const DecisionTree& tree, int idx, double confidence) {
  const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) {
    return {{node}, leaf_predicted_errors(node.counts, confidence)};
  }
  auto left = prune_rec(tree, node.left, confidence);
  auto right = prune_rec(tree, node.right, confidence);
  const double subtree_errors = left.predicted_errors + right.predicted_errors;
  const double as_leaf_errors = leaf_predicted_errors(node.counts, confidence);
  if (as_leaf_errors <= subtree_errors + 1e-12) {
    TreeNode leaf;
    leaf.klass = majority_class(node.counts);
    leaf.counts = node.counts;
    return {{std::move(leaf)}, as_leaf_errors};
  }
  PrunedSubtree out;
  TreeNode root = node;
  root.left = 1;
  root.right = 1 + static_cast<int>(left.nodes.size());
  out.nodes.push_back(std::move(root));
  for (auto& n : left.nodes) {
    if (!n.is_leaf()) {
      n.left += 1;
      n.right += 1;
    }
    out.nodes.push_back(std::move(n));
  }
  const int shift = 1 + static_cast<int>(left.nodes.size());
  for (auto& n : right.nodes) {
    if (!n.is_leaf()) {
      n.left += shift;
      n.right += shift;
    }
    out.nodes.push_back(std::move(n));
  }
  out.predicted_errors = subtree_errors;
  return out;
}

}  // namespace detail

/// Bottom-up pessimistic subtree replacement (no subtree raising).
inline DecisionTree prune(const DecisionTree& tree, double confidence = 0.25) {
  if (tree.nodes.empty()) throw std::invalid_argument("prune of empty tree");
  DecisionTree out;
  out.feature_names = tree.feature_names;
  out.class_name = tree.class_name;
  out.class_values = tree.class_values;
  out.nodes = detail::prune_rec(tree, 0, confidence).nodes;
  return out;
}

struct Prediction {
  int klass = -1;
  std::vector<double> distribution;
};

namespace detail {

inline std::vector<double> predict_dist(const DecisionTree& tree, int idx,
                                        std::span<const std::optional<double>> features) {
  const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) return node.counts;
  const auto& v = features[static_cast<std::size_t>(node.feature)];
  if (v) {
    return predict_dist(tree, *v <= node.threshold ? node.left : node.right, features);
  }
  // Absent at this test: descend both, weighted by training support.
  const auto& ln = tree.nodes[static_cast<std::size_t>(node.left)];
  const auto& rn = tree.nodes[static_cast<std::size_t>(node.right)];
  const double wl = total_weight(ln.counts);
  const double wr = total_weight(rn.counts);
  const double p_left = (wl + wr) > 0.0 ? wl / (wl + wr) : 0.5;
  auto dl = predict_dist(tree, node.left, features);
  auto dr = predict_dist(tree, node.right, features);
  std::vector<double> out(dl.size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = p_left * dl[k] + (1.0 - p_left) * dr[k];
  }
  return out;
}

}  // namespace detail

inline Prediction predict(const DecisionTree& tree,
                          std::span<const std::optional<double>> features) {
  if (features.size() != tree.feature_names.size()) {
    throw std::invalid_argument("feature schema mismatch");
  }
  Prediction p;
  p.distribution = detail::predict_dist(tree, 0, features);
  p.klass = detail::majority_class(p.distribution);
  return p;
}

inline Prediction predict(const DecisionTree& tree, const FeatureVector& row) {
  return predict(tree, row.features);
}

struct Evaluation {
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;  // [actual][predicted]
  int total = 0;
};

inline Evaluation evaluate(const DecisionTree& tree, const Dataset& test) {
  if (test.rows.empty()) throw std::invalid_argument("empty test set");
  if (test.feature_names != tree.feature_names) {
    throw std::invalid_argument("feature schema mismatch");
  }
  Evaluation ev;
  const std::size_t k = tree.class_values.size();
  ev.confusion.assign(k, std::vector<int>(k, 0));
  int correct = 0;
  for (const auto& row : test.rows) {
    const auto pred = predict(tree, row.features);
    ev.confusion[static_cast<std::size_t>(row.label)][static_cast<std::size_t>(pred.klass)]++;
    if (pred.klass == row.label) ++correct;
  }
  ev.total = static_cast<int>(test.rows.size());
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.total);
  return ev;
}

/// Plain-text confusion matrix plus the accuracy line.
inline std::string render_evaluation(const Evaluation& ev,
                                     const std::vector<std::string>& class_values) {
  std::string out = "confusion matrix (rows=actual, cols=predicted):\n";
  for (std::size_t a = 0; a < ev.confusion.size(); ++a) {
    out += "  " + class_values[a] + ":";
    for (std::size_t p = 0; p < ev.confusion[a].size(); ++p) {
      out += " " + std::to_string(ev.confusion[a][p]);
    }
    out += "\n";
  }
  char line[48];
  std::snprintf(line, sizeof(line), "accuracy=%.4f\n", ev.accuracy);
  out += line;
  return out;
}

}  // namespace aqpipe
