#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqpipe/tree.hpp"

namespace aqpipe {

struct RuleConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// One atomic condition: feature <= threshold, or feature > threshold.
struct RuleCondition {
  int feature = 0;
  bool greater = false;
  double threshold = 0.0;

  bool holds(double value) const { return greater ? value > threshold : value <= threshold; }
};

/// "If assumption then consequence": a conjunction of conditions and a class.
struct Rule {
  std::string id;
  std::vector<RuleCondition> conditions;
  int klass = -1;
  std::vector<double> counts;
};

struct RuleSet {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_values;
  std::vector<Rule> rules;
};

namespace detail {

inline void collect_rules(const DecisionTree& tree, int idx,
                          std::vector<RuleCondition>& path, RuleSet& out) {
  const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) {
    Rule r;
    r.id = "r" + std::to_string(out.rules.size() + 1);
    r.conditions = path;
    r.klass = node.klass;
    r.counts = node.counts;
    out.rules.push_back(std::move(r));
    return;
  }
  path.push_back({node.feature, false, node.threshold});
  collect_rules(tree, node.left, path, out);
  path.back().greater = true;
  collect_rules(tree, node.right, path, out);
  path.pop_back();
}

}  // namespace detail

/// One rule per leaf, in leaf preorder; the conjunction is the root-to-leaf
/// path.
inline RuleSet compile_rules(const DecisionTree& tree) {
  RuleSet rs;
  rs.feature_names = tree.feature_names;
  rs.class_values = tree.class_values;
  std::vector<RuleCondition> path;
  detail::collect_rules(tree, 0, path, rs);
  return rs;
}

/// Classifies a fully defined feature vector. Exactly one rule of a
/// tree-derived set matches; zero or multiple matches indicate a corrupted
/// rule set.
inline int eval_rules(const RuleSet& rs, std::span<const double> features) {
  if (features.size() != rs.feature_names.size()) {
    throw std::invalid_argument("feature schema mismatch");
  }
  int matched = -1;
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    const auto& rule = rs.rules[i];
    bool holds = true;
    for (const auto& cond : rule.conditions) {
      if (!cond.holds(features[static_cast<std::size_t>(cond.feature)])) {
        holds = false;
        break;
      }
    }
    if (!holds) continue;
    if (matched >= 0) {
      throw RuleConsistencyError("rules " + rs.rules[static_cast<std::size_t>(matched)].id +
                                 " and " + rule.id + " both match");
    }
    matched = static_cast<int>(i);
  }
  if (matched < 0) throw RuleConsistencyError("no rule matches the input");
  return rs.rules[static_cast<std::size_t>(matched)].klass;
}

namespace detail {

/// Per-feature half-open interval (lo, hi] implied by a rule's conditions.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool empty() const { return !(lo < hi); }
  bool intersects(const Interval& o) const {
    const double l = std::max(lo, o.lo);
    const double h = std::min(hi, o.hi);
    return l < h;
  }
};

inline std::vector<Interval> rule_intervals(const Rule& rule, std::size_t n_features) {
  std::vector<Interval> iv(n_features);
  for (const auto& c : rule.conditions) {
    auto& i = iv[static_cast<std::size_t>(c.feature)];
    if (c.greater) {
      i.lo = std::max(i.lo, c.threshold);
    } else {
      i.hi = std::min(i.hi, c.threshold);
    }
  }
  return iv;
}

}  // namespace detail

/// Interval analysis: no two rules of the set can match the same fully
/// defined input. (A rule whose own region is empty never matches.)
inline bool rules_mutually_exclusive(const RuleSet& rs) {
  const auto n = rs.feature_names.size();
  std::vector<std::vector<detail::Interval>> regions;
  regions.reserve(rs.rules.size());
  for (const auto& r : rs.rules) regions.push_back(detail::rule_intervals(r, n));
  for (std::size_t a = 0; a < regions.size(); ++a) {
    for (std::size_t b = a + 1; b < regions.size(); ++b) {
      bool overlap = true;
      for (std::size_t f = 0; f < n; ++f) {
        if (!regions[a][f].intersects(regions[b][f])) {
          overlap = false;
          break;
        }
      }
      if (overlap) return false;
    }
  }
  return true;
}

}  // namespace aqpipe
