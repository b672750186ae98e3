#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aqpipe/tree.hpp"

namespace aqpipe {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kModelSchemaVersion = 1;
inline constexpr std::string_view kModelFileExtension = ".aqmodel.json";

/// The portable form of an induced decision model: tree nodes in preorder
/// plus enough provenance to reproduce training.
struct ModelDocument {
  int version = kModelSchemaVersion;
  std::string model_id;
  std::string role;  // IMV | MVE | ICA
  DecisionTree tree;
  std::string config_hash;
  std::uint64_t seed = 0;
};

inline bool valid_model_role(std::string_view role) {
  return role == "IMV" || role == "MVE" || role == "ICA";
}

inline std::string export_model(const DecisionTree& tree, const std::string& role,
                                const std::string& model_id,
                                const std::string& config_hash, std::uint64_t seed) {
  if (!valid_model_role(role)) throw ModelError("invalid model role: " + role);
  nlohmann::ordered_json doc;
  doc["v"] = kModelSchemaVersion;
  doc["model_id"] = model_id;
  doc["role"] = role;
  doc["class_name"] = tree.class_name;
  doc["classes"] = tree.class_values;
  doc["features"] = tree.feature_names;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : tree.nodes) {
    nlohmann::ordered_json jn;
    if (n.is_leaf()) {
      jn["class"] = n.klass;
      jn["n"] = n.counts;
    } else {
      jn["f"] = n.feature;
      jn["t"] = n.threshold;
      jn["l"] = n.left;
      jn["r"] = n.right;
      jn["n"] = n.counts;
    }
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);
  doc["provenance"] = {{"config_hash", config_hash}, {"seed", seed}};
  return doc.dump(2) + "\n";
}

inline std::string export_model(const ModelDocument& m) {
  return export_model(m.tree, m.role, m.model_id, m.config_hash, m.seed);
}

namespace detail {

inline void require_field(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ModelError("model document: missing '" + std::string(key) +
                                         "' at " + path);
}

}  // namespace detail

inline ModelDocument import_model(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model document: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model document: top level must be an object");
  detail::require_field(doc, "v", "$");
  if (!doc["v"].is_number_integer() || doc["v"].get<int>() != kModelSchemaVersion) {
    throw ModelError("model document: unknown schema version");
  }
  for (const char* key : {"model_id", "role", "class_name", "classes", "features", "nodes"}) {
    detail::require_field(doc, key, "$");
  }
  ModelDocument m;
  m.version = doc["v"].get<int>();
  m.model_id = doc["model_id"].get<std::string>();
  m.role = doc["role"].get<std::string>();
  if (!valid_model_role(m.role)) throw ModelError("model document: invalid role '" + m.role + "'");
  m.tree.class_name = doc["class_name"].get<std::string>();
  m.tree.class_values = doc["classes"].get<std::vector<std::string>>();
  m.tree.feature_names = doc["features"].get<std::vector<std::string>>();
  if (m.tree.class_values.empty()) throw ModelError("model document: empty class list");

  const auto& nodes = doc["nodes"];
  if (!nodes.is_array() || nodes.empty()) {
    throw ModelError("model document: 'nodes' must be a non-empty array");
  }
  const int n_nodes = static_cast<int>(nodes.size());
  for (int i = 0; i < n_nodes; ++i) {
    const auto& jn = nodes[static_cast<std::size_t>(i)];
    const std::string path = "nodes[" + std::to_string(i) + "]";
    TreeNode node;
    if (jn.contains("f")) {
      for (const char* key : {"t", "l", "r", "n"}) detail::require_field(jn, key, path);
      node.feature = jn["f"].get<int>();
      node.threshold = jn["t"].get<double>();
      node.left = jn["l"].get<int>();
      node.right = jn["r"].get<int>();
      if (node.feature < 0 ||
          node.feature >= static_cast<int>(m.tree.feature_names.size())) {
        throw ModelError("model document: feature index out of range at " + path);
      }
      if (node.left <= i || node.left >= n_nodes || node.right <= i ||
          node.right >= n_nodes) {
        throw ModelError("model document: child index out of range at " + path);
      }
    } else {
      detail::require_field(jn, "class", path);
      detail::require_field(jn, "n", path);
      node.klass = jn["class"].get<int>();
      if (node.klass < 0 || node.klass >= static_cast<int>(m.tree.class_values.size())) {
        throw ModelError("model document: class index out of range at " + path);
      }
    }
    node.counts = jn["n"].get<std::vector<double>>();
    if (node.counts.size() != m.tree.class_values.size()) {
      throw ModelError("model document: support counts arity mismatch at " + path);
    }
    m.tree.nodes.push_back(std::move(node));
  }
  if (doc.contains("provenance")) {
    const auto& p = doc["provenance"];
    if (p.contains("config_hash")) m.config_hash = p["config_hash"].get<std::string>();
    if (p.contains("seed")) m.seed = p["seed"].get<std::uint64_t>();
  }
  return m;
}

inline ModelDocument load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return import_model(buf.str());
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

inline void save_model_file(const ModelDocument& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write model file: " + path);
  out << export_model(m);
}

}  // namespace aqpipe
