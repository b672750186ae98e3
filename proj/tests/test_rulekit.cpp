#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "aqpipe/fat.hpp"
#include "aqpipe/model_io.hpp"
#include "aqpipe/rules.hpp"
#include "helpers.hpp"

using namespace aqpipe;

namespace {

DecisionTree stump(double threshold = 5.0) {
  DecisionTree tree;
  tree.feature_names = {"x"};
  tree.class_name = "cls";
  tree.class_values = {"a", "b"};
  TreeNode root;
  root.feature = 0;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.counts = {3, 4};
  TreeNode left;
  left.klass = 0;
  left.counts = {3, 0};
  TreeNode right;
  right.klass = 1;
  right.counts = {0, 4};
  tree.nodes = {root, left, right};
  return tree;
}

DecisionTree single_leaf() {
  DecisionTree tree;
  tree.feature_names = {"x"};
  tree.class_name = "cls";
  tree.class_values = {"a", "b"};
  TreeNode leaf;
  leaf.klass = 1;
  leaf.counts = {1, 5};
  tree.nodes = {leaf};
  return tree;
}

}  // namespace

TEST_CASE("compile_rules: single leaf yields one unconditional rule") {
  const auto rs = compile_rules(single_leaf());
  REQUIRE(rs.rules.size() == 1);
  CHECK(rs.rules[0].conditions.empty());
  CHECK(rs.rules[0].klass == 1);
  // an unconditional rule matches anything
  CHECK(eval_rules(rs, std::vector<double>{123.0}) == 1);
}

TEST_CASE("compile_rules: stump yields two complementary rules") {
  const auto rs = compile_rules(stump());
  REQUIRE(rs.rules.size() == 2);
  REQUIRE(rs.rules[0].conditions.size() == 1);
  REQUIRE(rs.rules[1].conditions.size() == 1);
  CHECK_FALSE(rs.rules[0].conditions[0].greater);
  CHECK(rs.rules[1].conditions[0].greater);
  CHECK(rs.rules[0].conditions[0].threshold == rs.rules[1].conditions[0].threshold);
  CHECK(rules_mutually_exclusive(rs));
}

TEST_CASE("a fifteen-leaf tree compiles to exactly fifteen rules") {
  // chain of depth 14: each internal node hangs one leaf and one subtree
  DecisionTree tree;
  tree.feature_names = {"x"};
  tree.class_name = "cls";
  tree.class_values = {"a", "b"};
  const int leaves = 15;
  for (int i = 0; i < leaves - 1; ++i) {
    TreeNode node;
    node.feature = 0;
    node.threshold = static_cast<double>(i);
    node.left = static_cast<int>(tree.nodes.size()) + 1;
    node.right = static_cast<int>(tree.nodes.size()) + 2;
    node.counts = {2.0 * (leaves - i), 1.0};
    tree.nodes.push_back(node);
    TreeNode leaf;
    leaf.klass = i % 2;
    leaf.counts = {1, 1};
    tree.nodes.push_back(leaf);
    if (i == leaves - 2) {
      TreeNode last;
      last.klass = 1;
      last.counts = {0, 1};
      tree.nodes.push_back(last);
    }
  }
  // fix chain wiring: right child of node i is the next internal node
  int internal = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].is_leaf()) continue;
    tree.nodes[i].left = static_cast<int>(i) + 1;
    tree.nodes[i].right = static_cast<int>(i) + 2;
    ++internal;
  }
  REQUIRE(tree.leaf_count() == leaves);
  const auto rs = compile_rules(tree);
  CHECK(rs.rules.size() == 15);
}

TEST_CASE("eval_rules: stump routing") {
  const auto rs = compile_rules(stump(5.0));
  CHECK(eval_rules(rs, std::vector<double>{3.0}) == 0);
  CHECK(eval_rules(rs, std::vector<double>{5.0}) == 0);  // boundary goes left
  CHECK(eval_rules(rs, std::vector<double>{7.0}) == 1);
  REQUIRE_THROWS_AS(eval_rules(rs, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("eval_rules equals predict on random trees") {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> value(-1.0, 11.0);
  for (int t = 0; t < 25; ++t) {
    const auto tree = testing::random_tree(rng);
    const auto rs = compile_rules(tree);
    REQUIRE(rs.rules.size() == static_cast<std::size_t>(tree.leaf_count()));
    CHECK(rules_mutually_exclusive(rs));
    for (int i = 0; i < 300; ++i) {
      std::vector<double> x;
      std::vector<std::optional<double>> xo;
      for (std::size_t f = 0; f < tree.feature_names.size(); ++f) {
        const double v = value(rng);
        x.push_back(v);
        xo.emplace_back(v);
      }
      REQUIRE(eval_rules(rs, x) == predict(tree, xo).klass);
    }
  }
}

TEST_CASE("eval_rules flags corrupted rule sets") {
  auto rs = compile_rules(stump(5.0));
  SECTION("overlap: two rules match") {
    rs.rules[1].conditions[0].greater = false;  // now both cover x <= 5
    REQUIRE_THROWS_AS(eval_rules(rs, std::vector<double>{3.0}), RuleConsistencyError);
    CHECK_FALSE(rules_mutually_exclusive(rs));
  }
  SECTION("gap: no rule matches") {
    rs.rules.pop_back();
    REQUIRE_THROWS_AS(eval_rules(rs, std::vector<double>{7.0}), RuleConsistencyError);
  }
}

// ---- model documents --------------------------------------------------------

TEST_CASE("model round trip preserves predictions on a grid") {
  std::mt19937 rng(7);
  const auto tree = testing::random_tree(rng, 3, 2, 6);
  const auto bytes = export_model(tree, "ICA", "m1", "deadbeef", 42);
  const auto doc = import_model(bytes);
  CHECK(doc.role == "ICA");
  CHECK(doc.model_id == "m1");
  CHECK(doc.config_hash == "deadbeef");
  CHECK(doc.seed == 42);
  REQUIRE(doc.tree.nodes.size() == tree.nodes.size());

  for (double a = -1.0; a <= 11.0; a += 0.37) {
    for (double b = -1.0; b <= 11.0; b += 0.73) {
      const std::vector<std::optional<double>> x = {a, b, (a + b) / 2.0};
      REQUIRE(predict(doc.tree, x).klass == predict(tree, x).klass);
    }
  }
}

TEST_CASE("model thresholds survive the round trip losslessly") {
  auto tree = stump(0.1 + 0.2);  // a threshold with no short decimal form
  tree.nodes[0].threshold = 0.30000000000000004;
  const auto doc = import_model(export_model(tree, "IMV", "m", "h", 0));
  CHECK(doc.tree.nodes[0].threshold == tree.nodes[0].threshold);
}

TEST_CASE("model import rejects bad documents") {
  const auto tree = stump();
  auto bytes = export_model(tree, "IMV", "m1", "h", 1);

  SECTION("unknown version") {
    auto j = nlohmann::json::parse(bytes);
    j["v"] = 99;
    REQUIRE_THROWS_WITH(import_model(j.dump()),
                        Catch::Matchers::ContainsSubstring("unknown schema version"));
  }
  SECTION("leaf missing support counts names the node") {
    auto j = nlohmann::json::parse(bytes);
    j["nodes"][1].erase("n");
    REQUIRE_THROWS_WITH(import_model(j.dump()),
                        Catch::Matchers::ContainsSubstring("nodes[1]"));
  }
  SECTION("child index out of range") {
    auto j = nlohmann::json::parse(bytes);
    j["nodes"][0]["r"] = 17;
    REQUIRE_THROWS_WITH(import_model(j.dump()),
                        Catch::Matchers::ContainsSubstring("nodes[0]"));
  }
  SECTION("bad role") {
    auto j = nlohmann::json::parse(bytes);
    j["role"] = "XXX";
    REQUIRE_THROWS_AS(import_model(j.dump()), ModelError);
  }
  SECTION("not json at all") {
    REQUIRE_THROWS_AS(import_model("not json"), ModelError);
  }
}

// ---- formal alarm thresholds --------------------------------------------------

namespace {

MeasurementTuple tuple_with(ChannelId c, double value, ValidationTag tag,
                            bool estimated = false) {
  MeasurementTuple t;
  t.at = 900;
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    auto& qm = t.entries[i];
    qm.base = {kAllChannels[i], t.at, 1.0};
    qm.tag = ValidationTag::valid;
    qm.level = Level::low;
    qm.trend = Trend::steady;
    qm.persistence = 1;
  }
  auto& qm = t.entry(c);
  qm.base.value = estimated ? std::optional<double>() : std::optional<double>(value);
  qm.tag = tag;
  qm.estimated = estimated;
  if (estimated) qm.level = Level::high;
  return t;
}

const std::vector<ThresholdRule> kRules = {
    {"O3-info-180", ChannelId::O3, 180.0, Severity::info, "ozone info"},
    {"O3-alert-240", ChannelId::O3, 240.0, Severity::alert, "ozone alert"},
    {"SO2-info-350", ChannelId::SO2, 350.0, Severity::info, "so2 info"},
};

}  // namespace

TEST_CASE("fat_evaluate: below, at, and above the threshold") {
  CHECK(fat_evaluate(kRules, tuple_with(ChannelId::O3, 150, ValidationTag::valid)).empty());

  const auto at = fat_evaluate(kRules, tuple_with(ChannelId::O3, 180, ValidationTag::valid));
  REQUIRE(at.size() == 1);  // >= is inclusive
  CHECK(at[0].rule_id == "O3-info-180");
  CHECK(at[0].kind == AlarmKind::formal);
  CHECK(at[0].channel == ChannelId::O3);

  const auto both = fat_evaluate(kRules, tuple_with(ChannelId::O3, 250, ValidationTag::valid));
  REQUIRE(both.size() == 2);
  CHECK(both[0].rule_id == "O3-info-180");
  CHECK(both[1].rule_id == "O3-alert-240");
}

TEST_CASE("fat_evaluate: invalid or estimated entries never trigger") {
  const auto invalid =
      fat_evaluate(kRules, tuple_with(ChannelId::O3, 200, ValidationTag::invalid));
  CHECK(invalid.empty());
  const auto estimated =
      fat_evaluate(kRules, tuple_with(ChannelId::O3, 200, ValidationTag::invalid, true));
  CHECK(estimated.empty());
}

TEST_CASE("fat_evaluate: output follows canonical channel order") {
  auto t = tuple_with(ChannelId::O3, 300, ValidationTag::valid);
  t.entry(ChannelId::SO2).base.value = 400.0;
  const auto alarms = fat_evaluate(kRules, t);
  REQUIRE(alarms.size() == 3);
  CHECK(alarms[0].channel == ChannelId::SO2);  // SO2 precedes O3 canonically
  CHECK(alarms[1].rule_id == "O3-info-180");
  CHECK(alarms[2].rule_id == "O3-alert-240");
}

TEST_CASE("fat_evaluate is monotone in valid values") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> value(100.0, 300.0);
  for (int i = 0; i < 200; ++i) {
    const double v = value(rng);
    auto base = tuple_with(ChannelId::O3, v, ValidationTag::valid);
    const auto before = fat_evaluate(kRules, base);
    auto raised = base;
    raised.entry(ChannelId::O3).base.value = v + 50.0;
    const auto after = fat_evaluate(kRules, raised);
    REQUIRE(after.size() >= before.size());
    for (const auto& alarm : before) {
      const bool still = std::any_of(after.begin(), after.end(), [&](const Alarm& a) {
        return a.rule_id == alarm.rule_id;
      });
      CHECK(still);
    }
  }
}
