#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqpipe {

/// A labeled (or to-be-labeled) feature vector. Features may be absent.
struct FeatureVector {
  std::vector<std::optional<double>> features;
  int label = -1;  // index into Dataset::class_values; -1 when unlabeled
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::string class_name;
  std::vector<std::string> class_values;
  std::vector<FeatureVector> rows;

  std::size_t feature_count() const { return feature_names.size(); }

  int class_index(std::string_view value) const {
    for (std::size_t i = 0; i < class_values.size(); ++i) {
      if (class_values[i] == value) return static_cast<int>(i);
    }
    return -1;
  }

  void add_row(std::vector<std::optional<double>> features, int label) {
    if (features.size() != feature_names.size()) {
      throw std::invalid_argument("row arity does not match feature schema");
    }
    rows.push_back({std::move(features), label});
  }

  /// Number of distinct class values actually present in the rows.
  std::size_t distinct_labels() const {
    std::vector<bool> seen(class_values.size(), false);
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (r.label >= 0 && !seen[static_cast<std::size_t>(r.label)]) {
        seen[static_cast<std::size_t>(r.label)] = true;
        ++n;
      }
    }
    return n;
  }
};

}  // namespace aqpipe
