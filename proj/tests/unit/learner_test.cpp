#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "sdt/error.hpp"
#include "sdt/learner.hpp"
#include "sdt/oracle.hpp"
#include "test_support.hpp"

namespace sdt {
namespace {

using testing::make_instance;

AnchoredDataset tabular(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& labels,
                        std::size_t n_classes) {
  WindowedDataset ds;
  ds.n_attributes = rows.front().size();
  ds.d = 1;
  ds.classes = testing::class_names(n_classes);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.instances.push_back(std::make_shared<const SpatialInstance>(ds.n_attributes, 1, 1, rows[i], labels[i]));
  }
  return ds.anchored();
}

LearnerConfig small_config(Fragment f) {
  LearnerConfig cfg;
  cfg.fragment = f;
  cfg.threshold_policy = ThresholdPolicy::all_midpoints();
  cfg.min_samples_leaf = 2;
  cfg.min_info_gain = 0.0;
  return cfg;
}

void expect_same_score(const std::optional<SplitScore>& a, const std::optional<SplitScore>& b) {
  ASSERT_EQ(a.has_value(), b.has_value());
  if (!a) return;
  EXPECT_EQ(a->decision, b->decision) << to_text(a->decision) << " vs " << to_text(b->decision);
  EXPECT_NEAR(a->gain, b->gain, 1e-12);
  EXPECT_EQ(a->n_yes, b->n_yes);
  EXPECT_EQ(a->n_no, b->n_no);
}

void expect_same_tree(const SpatialDecisionTree& a, const SpatialDecisionTree& b) {
  EXPECT_TRUE(same_structure(a.root(), b.root())) << write_tree(a) << "\n---\n" << write_tree(b);
}

TEST(Config, DefaultsAndValidation) {
  const LearnerConfig cfg;
  EXPECT_EQ(cfg.min_samples_leaf, 4);
  EXPECT_DOUBLE_EQ(cfg.min_info_gain, 0.01);
  EXPECT_DOUBLE_EQ(cfg.max_leaf_entropy, 0.3);
  EXPECT_EQ(cfg.gammas.size(), 5U);
  EXPECT_EQ(cfg.threshold_policy, ThresholdPolicy::quantiles(20));
  EXPECT_NO_THROW(cfg.validate());

  LearnerConfig bad = cfg;
  bad.min_samples_leaf = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.gammas.clear();
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.threshold_policy = ThresholdPolicy::quantiles(0);
  EXPECT_THROW(bad.validate(), InvalidArgument);

  LearnerConfig messy = cfg;
  messy.comparators = {Comparator::Ge, Comparator::Le, Comparator::Ge};
  messy.gammas = {Gamma::one(), Gamma(3, 5), Gamma(3, 5)};
  const auto norm = messy.normalized();
  EXPECT_EQ(norm.comparators, (std::vector<Comparator>{Comparator::Le, Comparator::Ge}));
  EXPECT_EQ(norm.gammas, (std::vector<Gamma>{Gamma(3, 5), Gamma::one()}));
}

TEST(ThresholdPolicy, Names) {
  EXPECT_EQ(ThresholdPolicy::parse("all-midpoints"), ThresholdPolicy::all_midpoints());
  EXPECT_EQ(ThresholdPolicy::parse("quantiles(7)"), ThresholdPolicy::quantiles(7));
  EXPECT_EQ(ThresholdPolicy::quantiles(20).name(), "quantiles(20)");
  EXPECT_THROW(ThresholdPolicy::parse("quantiles(x)"), ParseError);
}

TEST(Thresholds, Policies) {
  const auto ds = tabular({{1}, {4}, {2}, {4}, {8}}, {0, 1, 0, 1, 0}, 2);
  EXPECT_EQ(thresholds(ds, 0, ThresholdPolicy::all_midpoints()), (std::vector<double>{1.5, 3, 6}));
  // Type-7 median of {1,2,4,4,8}.
  EXPECT_EQ(thresholds(ds, 0, ThresholdPolicy::quantiles(1)), (std::vector<double>{4}));
  // Quartiles: h = 4p over the sorted sample.
  EXPECT_EQ(thresholds(ds, 0, ThresholdPolicy::quantiles(3)), (std::vector<double>{2, 4}));
  const auto single = tabular({{3}, {3}}, {0, 1}, 2);
  EXPECT_TRUE(thresholds(single, 0, ThresholdPolicy::all_midpoints()).empty());
  EXPECT_THROW(thresholds(ds, 1, ThresholdPolicy::all_midpoints()), InvalidArgument);
}

TEST(Thresholds, MidpointCountIsDistinctMinusOne) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ds = testing::random_anchored(seed, 6, 3, 1, 2, 7);
    std::set<double> distinct;
    for (const auto& item : ds.items()) distinct.insert(item.instance->values().begin(), item.instance->values().end());
    EXPECT_EQ(thresholds(ds, 0, ThresholdPolicy::all_midpoints()).size(), distinct.size() - 1);
  }
}

TEST(Candidates, SingleCandidate) {
  const auto ds = tabular({{1}, {2}}, {0, 1}, 2);
  LearnerConfig cfg = small_config(Fragment::Propositional);
  cfg.comparators = {Comparator::Le};
  cfg.gammas = {Gamma::one()};
  const auto cands = candidate_decisions(ds, cfg);
  ASSERT_EQ(cands.size(), 1U);
  EXPECT_EQ(to_text(cands[0]), "ATTR_1 <= 1.5");
}

TEST(Candidates, ProductCountAndOrder) {
  // Two attributes with values {0,1,2,3}: three midpoints each.
  std::vector<InstancePtr> insts;
  for (int i = 0; i < 4; ++i) {
    insts.push_back(make_instance(3, 3, {std::vector<double>(9, i), std::vector<double>(9, 3 - i)}, i % 2));
  }
  const auto ds = anchor(insts, 2, testing::class_names(2), CenterPixel{});
  LearnerConfig cfg = small_config(Fragment::RCC8);
  const auto cands = candidate_decisions(ds, cfg);
  EXPECT_EQ(cands.size(), 480U);

  SearchStats stats;
  (void)find_best_decision(ds, cfg, nullptr, &stats);
  EXPECT_EQ(stats.candidates, 480);

  EXPECT_EQ(to_text(cands[0]), "DC ATTR_1 <=_0.6 0.5");
  EXPECT_EQ(to_text(cands[1]), "DC ATTR_1 <=_0.7 0.5");
  EXPECT_EQ(to_text(cands[5]), "DC ATTR_1 >=_0.6 0.5");
  EXPECT_EQ(to_text(cands[10]), "DC ATTR_1 <=_0.6 1.5");
  EXPECT_EQ(to_text(cands[30]), "DC ATTR_2 <=_0.6 0.5");
  EXPECT_EQ(to_text(cands[60]), "EC ATTR_1 <=_0.6 0.5");
  EXPECT_EQ(to_text(cands[420]), "ATTR_1 <=_0.6 0.5");
  EXPECT_EQ(candidate_decisions(ds, cfg), cands);
}

TEST(InfoGain, Examples) {
  const auto ds = tabular({{1}, {1}, {1}, {1}, {1}, {9}, {9}, {9}, {9}, {9}}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  const Decision sep = testing::prop(0, Comparator::Le, 5);
  EXPECT_DOUBLE_EQ(info_split(ds, sep), 0.0);
  EXPECT_DOUBLE_EQ(info_gain(ds, sep), 1.0);
  const Decision taut = testing::prop(0, Comparator::Ge, 0);
  EXPECT_DOUBLE_EQ(info_split(ds, taut), 1.0);
  EXPECT_DOUBLE_EQ(info_gain(ds, taut), 0.0);

  const auto prop_ds = tabular({{1}, {1}, {2}, {2}}, {0, 1, 0, 1}, 2);
  EXPECT_NEAR(info_gain(prop_ds, testing::prop(0, Comparator::Le, 1.5)), 0.0, 1e-15);

  const auto best = find_best_decision(ds, small_config(Fragment::Propositional));
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->decision, testing::prop(0, Comparator::Le, 5, Gamma(3, 5)));
  EXPECT_DOUBLE_EQ(best->gain, 1.0);
}

TEST(FindBest, PureAndEmpty) {
  const auto ds = tabular({{1}, {2}, {3}}, {1, 1, 1}, 2);
  EXPECT_FALSE(find_best_decision(ds, LearnerConfig{}).has_value());
  EXPECT_FALSE(oracle::brute_force_best_decision(ds, LearnerConfig{}).has_value());
  EXPECT_THROW(find_best_decision(AnchoredDataset(1, {"a"}), LearnerConfig{}), InvalidArgument);
}

TEST(FindBest, MinSamplesLeafFilters) {
  // The only perfect separator isolates a single instance.
  const auto ds = tabular({{1}, {2}, {2}, {2}}, {0, 1, 1, 1}, 2);
  LearnerConfig cfg = small_config(Fragment::Propositional);
  cfg.min_samples_leaf = 1;
  EXPECT_TRUE(find_best_decision(ds, cfg).has_value());
  cfg.min_samples_leaf = 2;
  EXPECT_FALSE(find_best_decision(ds, cfg).has_value());
}

TEST(FindBest, MatchesBruteForce) {
  const Fragment fragments[] = {Fragment::RCC8, Fragment::RCC5, Fragment::Propositional, Fragment::HS2Full};
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Fragment f = fragments[seed % 4];
    const std::size_t m = f == Fragment::HS2Full ? 8 : 16;
    auto base = testing::random_windows(seed, m, 3, 2, 2 + seed % 2, 4);
    AnchoredDataset ds = base.anchored();
    // Move the anchors once so the search starts from several refs.
    if (seed % 3 == 0) ds = split(ds, testing::modal("TPPi", 0, Comparator::Ge, 1, Gamma(3, 5))).first;
    if (ds.empty()) continue;
    LearnerConfig cfg = small_config(f);
    cfg.comparators = {Comparator::Lt, Comparator::Le, Comparator::Ge, Comparator::Ne};
    cfg.gammas = {Gamma(1, 2), Gamma(4, 5), Gamma::one()};
    if (seed % 2) cfg.threshold_policy = ThresholdPolicy::quantiles(3);
    const auto fast = find_best_decision(ds, cfg);
    const auto slow = oracle::brute_force_best_decision(ds, cfg);
    SCOPED_TRACE(seed);
    expect_same_score(fast, slow);
  }
}

TEST(FindBest, WorkerAndCacheInvariant) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto ds = testing::random_anchored(seed, 20, 3, 3, 3);
    LearnerConfig cfg = small_config(Fragment::RCC8);
    const auto one = find_best_decision(ds, cfg);
    cfg.workers = 8;
    expect_same_score(find_best_decision(ds, cfg), one);
    const auto prepared = preprocess(ds, cfg);
    ASSERT_NE(prepared.cache, nullptr);
    expect_same_score(find_best_decision(prepared.data, cfg, prepared.cache.get()), one);
  }
}

TEST(Learn, PureDatasetIsLeaf) {
  const auto ds = tabular({{1}, {5}, {3}}, {1, 1, 1}, 2);
  const auto tree = learn(ds, LearnerConfig{});
  ASSERT_TRUE(tree.root().is_leaf());
  EXPECT_EQ(tree.root().label, 1U);
  EXPECT_EQ(tree.root().stop, StopReason::Pure);
  EXPECT_THROW(learn(AnchoredDataset(1, {"a"}), LearnerConfig{}), InvalidArgument);
}

TEST(Learn, StopReasons) {
  const auto ds = testing::random_anchored(9, 7, 3, 1, 2);
  LearnerConfig cfg;
  cfg.max_leaf_entropy = 0.0;
  const auto small = learn(ds, cfg);  // 7 < 2 * 4
  EXPECT_EQ(small.root().stop, StopReason::TooSmall);
  cfg.max_depth = 0;
  const auto big = learn(testing::random_anchored(9, 40, 3, 1, 2), cfg);
  EXPECT_EQ(big.root().stop, StopReason::MaxDepth);
}

TEST(Learn, OneLeafPerClassOnSeparableData) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < 6; ++c) {
    for (int k = 0; k < 10; ++k) {
      rows.push_back({static_cast<double>(10 * c + k % 4), static_cast<double>(k)});
      labels.push_back(c);
    }
  }
  const auto tree = learn(tabular(rows, labels, 6), small_config(Fragment::Propositional));
  EXPECT_EQ(tree.leaf_count(), 6U);
  EXPECT_EQ(tree.node_count(), 11U);
  std::vector<int> per_class(6, 0);
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (n.is_leaf()) {
      ++per_class[n.label];
      EXPECT_EQ(n.stop, StopReason::Pure);
      return;
    }
    walk(*n.yes);
    walk(*n.no);
  };
  walk(tree.root());
  EXPECT_EQ(per_class, std::vector<int>(6, 1));
}

// Every leaf is either pure enough or records the rule that forced it, and
// re-classifying the training set reproduces the leaf histograms.
TEST(Learn, LeafInvariants) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ds = testing::random_anchored(seed, 40, 3, 2, 3);
    const auto tree = learn(ds, LearnerConfig{});
    std::function<void(const Node&)> walk = [&](const Node& n) {
      if (n.is_leaf()) {
        EXPECT_NE(n.stop, StopReason::None);
        if (n.stop == StopReason::Pure) {
          EXPECT_LE(entropy(n.counts), 0.3);
        }
        EXPECT_EQ(n.label, n.counts.majority());
        return;
      }
      EXPECT_GE(n.gain, 0.01);
      EXPECT_GE(n.yes->counts.total(), 4);
      EXPECT_GE(n.no->counts.total(), 4);
      walk(*n.yes);
      walk(*n.no);
    };
    walk(tree.root());
    std::int64_t correct = 0;
    std::int64_t majority_total = 0;
    std::function<void(const Node&)> count = [&](const Node& n) {
      if (n.is_leaf()) {
        majority_total += n.counts[n.label];
        return;
      }
      count(*n.yes);
      count(*n.no);
    };
    count(tree.root());
    for (const auto& item : ds.items()) correct += classify(tree, *item.instance) == item.instance->label() ? 1 : 0;
    EXPECT_EQ(correct, majority_total);
  }
}

TEST(Learn, DeterministicAcrossWorkersAndCache) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ds = testing::random_anchored(seed, 30, 3, 2, 2);
    LearnerConfig cfg;
    cfg.fragment = seed % 2 ? Fragment::RCC8 : Fragment::RCC5;
    const auto base = learn(ds, cfg);
    cfg.workers = 8;
    expect_same_tree(learn(ds, cfg), base);
    cfg.use_cache = false;
    LearnStats stats;
    expect_same_tree(learn(ds, cfg), base);
    (void)learn(ds, cfg, &stats);
    EXPECT_FALSE(stats.cache_used);
    EXPECT_EQ(write_tree(learn(ds, cfg)), write_tree(base));
  }
}

TEST(Learn, MatchesReferenceC45) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ds = testing::random_tabular(seed, 60, 3, 3);
    LearnerConfig cfg;
    cfg.fragment = Fragment::Propositional;
    cfg.threshold_policy = seed % 2 ? ThresholdPolicy::all_midpoints() : ThresholdPolicy::quantiles(5);
    expect_same_tree(learn(ds, cfg), oracle::reference_c45(ds, cfg));
  }
}

// On the containment task the best modal decision beats every
// propositional one.
TEST(Learn, ModalBeatsPropositionalOnContainment) {
  const auto task = oracle::generate_containment_task(40, 8, 3);
  const auto ds = task.data.anchored();
  LearnerConfig cfg;
  cfg.fragment = Fragment::HS2Full;
  cfg.min_info_gain = 0.0;
  const auto modal_best = find_best_decision(ds, cfg);
  cfg.fragment = Fragment::Propositional;
  const auto prop_best = find_best_decision(ds, cfg);
  ASSERT_TRUE(modal_best.has_value());
  ASSERT_TRUE(modal_best->decision.is_modal());
  const double prop_gain = prop_best ? prop_best->gain : 0.0;
  EXPECT_GT(modal_best->gain, prop_gain);
}

TEST(ParallelFor, CoversRangeAndPropagatesErrors) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(hits, std::vector<int>(100, 1));
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw InvalidArgument("boom");
                            }),
               InvalidArgument);
}

}  // namespace
}  // namespace sdt
