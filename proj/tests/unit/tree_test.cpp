#include <gtest/gtest.h>

#include <filesystem>
#include <regex>

#include "sdt/error.hpp"
#include "sdt/learner.hpp"
#include "sdt/tree.hpp"
#include "test_support.hpp"

namespace sdt {
namespace {

using testing::figure_tree;
using testing::leaf;
using testing::modal;
using testing::prop;

SpatialDecisionTree leaf_tree() {
  return SpatialDecisionTree(Node::leaf(0, ClassCounts({3, 1}), StopReason::Pure), {"water", "soil"}, 1);
}

std::size_t count_matches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                                std::sregex_iterator()));
}

TEST(Tree, Counts) {
  const auto t = figure_tree();
  EXPECT_EQ(t.node_count(), 11U);
  EXPECT_EQ(t.leaf_count(), 6U);
  EXPECT_EQ(t.depth(), 3U);
  EXPECT_EQ(leaf_tree().node_count(), 1U);
  EXPECT_EQ(leaf_tree().depth(), 0U);
}

TEST(Tree, CopyIsDeep) {
  const auto t = figure_tree();
  const SpatialDecisionTree copy = t;
  EXPECT_TRUE(copy == t);
  EXPECT_NE(&copy.root(), &t.root());
}

TEST(Classify, LeafAndTautology) {
  const auto inst = testing::make_instance(3, 3, {std::vector<double>(9, 2.0)});
  EXPECT_EQ(classify(leaf_tree(), *testing::make_instance(1, 1, {{5}})), 0U);
  const SpatialDecisionTree taut(
      testing::inner(prop(0, Comparator::Ge, 0), leaf(1, 2), leaf(0, 2)), {"a", "b"}, 1);
  EXPECT_EQ(classify(taut, *inst), 1U);
  const SpatialDecisionTree never(
      testing::inner(modal("PO", 0, Comparator::Lt, 0), leaf(1, 2), leaf(0, 2)), {"a", "b"}, 1);
  EXPECT_EQ(classify(never, *inst), 0U);
}

TEST(Classify, NoBranchKeepsRefs) {
  // Centre pixel 9, everything else 0. The root fails on the centre, then
  // the no-branch tests the centre again with the same refs.
  std::vector<double> plane(9, 0.0);
  plane[4] = 9;
  const auto inst = testing::make_instance(3, 3, {plane});
  const SpatialDecisionTree t(
      testing::inner(prop(0, Comparator::Lt, 5), leaf(0, 3),
                     testing::inner(prop(0, Comparator::Ge, 9), leaf(1, 3), leaf(2, 3))),
      {"a", "b", "c"}, 1);
  EXPECT_EQ(classify(t, *inst), 1U);
}

TEST(Rules, FigureTreeClassTwo) {
  const auto rules = extract_rules(figure_tree());
  ASSERT_EQ(rules.size(), 6U);
  const auto it = std::find_if(rules.begin(), rules.end(), [](const Rule& r) { return r.consequent == 1; });
  ASSERT_NE(it, rules.end());
  ASSERT_EQ(it->antecedent.size(), 3U);
  EXPECT_FALSE(it->antecedent[0].positive);
  EXPECT_TRUE(it->antecedent[1].positive);
  EXPECT_TRUE(it->antecedent[2].positive);
  EXPECT_EQ(rule_formula(*it), "[NTPP⁻¹](A₄₃ <₀.₂ 1978) ∧ ⟨EC⟩(A₈₃ ≥ 638 ∧ A₆ ≤ 1625) ⇒ C₂");
  // Pre-order, yes before no.
  std::vector<std::size_t> order;
  for (const auto& r : rules) order.push_back(r.consequent);
  EXPECT_EQ(order, (std::vector<std::size_t>{5, 4, 0, 1, 2, 3}));
}

TEST(Rules, LeafAndChain) {
  const auto rules = extract_rules(leaf_tree());
  ASSERT_EQ(rules.size(), 1U);
  EXPECT_TRUE(rules[0].antecedent.empty());
  EXPECT_EQ(rule_formula(rules[0]), "⊤ ⇒ C₁");

  auto node = leaf(0, 2);
  for (int k = 0; k < 4; ++k) node = testing::inner(prop(0, Comparator::Le, k), std::move(node), leaf(1, 2));
  const SpatialDecisionTree chain(std::move(node), {"a", "b"}, 1);
  const auto chain_rules = extract_rules(chain);
  EXPECT_EQ(chain_rules.front().antecedent.size(), 4U);
}

// Exactly one rule fires for each instance and it agrees with classify.
TEST(Rules, PartitionInstanceSpace) {
  const auto train = testing::random_anchored(4, 60, 3, 2, 3);
  const auto tree = learn(train, LearnerConfig{});
  const auto rules = extract_rules(tree);
  const auto probe = testing::random_windows(99, 80, 3, 2, 3);
  const HyperRectangle r0 = resolve_r0(CenterPixel{}, GridBounds{3, 3});
  for (const auto& inst : probe.instances) {
    std::size_t fired = 0;
    std::size_t label = 0;
    for (const auto& r : rules) {
      if (rule_matches(r, *inst, r0)) {
        ++fired;
        label = r.consequent;
      }
    }
    ASSERT_EQ(fired, 1U);
    EXPECT_EQ(label, classify(tree, *inst, r0));
  }
  const auto fig_rules = extract_rules(figure_tree());
  const auto big = testing::random_windows(5, 30, 3, 200, 6, 4000);
  for (const auto& inst : big.instances) {
    std::size_t fired = 0;
    for (const auto& r : fig_rules) fired += rule_matches(r, *inst, r0) ? 1 : 0;
    EXPECT_EQ(fired, 1U);
  }
}

TEST(Render, Text) {
  EXPECT_EQ(render(leaf_tree(), RenderFormat::Text), "leaf: C₁ (counts 3 1)\n");
  const auto text = render(figure_tree(), RenderFormat::Text);
  EXPECT_NE(text.find("⟨NTPP⁻¹⟩(A₄₃ ≥₀.₈ 1978)"), std::string::npos);
  EXPECT_NE(text.find("no [NTPP⁻¹](A₄₃ <₀.₂ 1978):"), std::string::npos);
  EXPECT_EQ(count_matches(text, "leaf: "), 6U);
}

TEST(Render, Dot) {
  const auto dot = render(figure_tree(), RenderFormat::Dot);
  EXPECT_TRUE(dot.starts_with("digraph sdt {"));
  EXPECT_TRUE(dot.ends_with("}\n"));
  EXPECT_EQ(count_matches(dot, "shape=ellipse"), 5U);
  EXPECT_EQ(count_matches(dot, "shape=box"), 6U);
  EXPECT_EQ(count_matches(dot, " -> "), 10U);
  EXPECT_EQ(count_matches(dot, "style=dashed"), 5U);
  EXPECT_NE(dot.find("[NTPP⁻¹](A₄₃ <₀.₂ 1978)"), std::string::npos);
  EXPECT_EQ(parse_render_format("dot"), RenderFormat::Dot);
  EXPECT_THROW(parse_render_format("svg"), InvalidArgument);
}

TEST(Render, RulesRoundTrip) {
  for (const auto& tree : {figure_tree(), leaf_tree(), learn(testing::random_anchored(8, 50, 3, 2, 3), LearnerConfig{})}) {
    const auto text = render(tree, RenderFormat::Rules);
    EXPECT_TRUE(text.starts_with("SDR v1\n"));
    EXPECT_EQ(parse_rules(text), extract_rules(tree));
  }
  const auto text = render(figure_tree(), RenderFormat::Rules);
  EXPECT_NE(text.find("rule C2 <- no NTPPi ATTR_43 >=_0.8 1978 ; yes EC ATTR_83 >= 638 ; yes ATTR_6 <= 1625"),
            std::string::npos);
  EXPECT_THROW(parse_rules("rule C1 <- true\n"), ParseError);
  EXPECT_THROW(parse_rules("SDR v1\nrule C0 <- true\n"), ParseError);
  EXPECT_THROW(parse_rules("SDR v1\nrule C1 <- maybe ATTR_1 <= 2\n"), ParseError);
}

TEST(Serialize, RoundTrip) {
  std::vector<SpatialDecisionTree> trees;
  trees.push_back(figure_tree());
  trees.push_back(leaf_tree());
  LearnerConfig cfg;
  cfg.r0 = CornerPixel{};
  trees.push_back(learn(testing::random_windows(2, 50, 3, 2, 3).anchored(CornerPixel{}), cfg));
  for (const auto& t : trees) {
    const auto text = write_tree(t);
    const auto back = read_tree(text);
    EXPECT_TRUE(back == t);
    EXPECT_EQ(write_tree(back), text);
  }
  EXPECT_EQ(r0_policy_name(read_tree(write_tree(trees[2])).r0()), "corner");

  const auto path = std::filesystem::temp_directory_path() / "sdt_tree_roundtrip.sdt";
  save_tree(trees[0], path.string());
  EXPECT_TRUE(load_tree(path.string()) == trees[0]);
  std::filesystem::remove(path);
}

TEST(Serialize, Errors) {
  EXPECT_THROW(read_tree(""), ParseError);
  EXPECT_THROW(read_tree("SDT v2\n"), ParseError);
  const auto text = write_tree(leaf_tree());
  EXPECT_THROW(read_tree(text.substr(0, text.size() - 12)), ParseError);
  std::string bad = text;
  bad.replace(bad.find("counts 3 1"), 10, "counts 3 x");
  EXPECT_THROW(read_tree(bad), ParseError);
  EXPECT_THROW(load_tree("/nonexistent/tree.sdt"), Error);
}

}  // namespace
}  // namespace sdt
