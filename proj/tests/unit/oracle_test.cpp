#include <gtest/gtest.h>

#include "sdt/error.hpp"
#include "sdt/oracle.hpp"
#include "test_support.hpp"

namespace sdt {
namespace {

HyperRectangle swap_axes(const HyperRectangle& r) { return HyperRectangle{r.axis(1), r.axis(0)}; }

Rcc8 converse(Rcc8 r) {
  switch (r) {
    case Rcc8::TPP: return Rcc8::TPPi;
    case Rcc8::NTPP: return Rcc8::NTPPi;
    case Rcc8::TPPi: return Rcc8::TPP;
    case Rcc8::NTPPi: return Rcc8::NTPP;
    default: return r;
  }
}

TEST(Rcc8Classify, Examples) {
  const HyperRectangle a{{1, 3}, {1, 3}};
  EXPECT_EQ(oracle::rcc8_classify(a, a), Rcc8::EQ);
  EXPECT_EQ(oracle::rcc8_classify(a, HyperRectangle{{1, 3}, {4, 5}}), Rcc8::DC);
  EXPECT_EQ(oracle::rcc8_classify(a, HyperRectangle{{3, 4}, {1, 2}}), Rcc8::EC);
  EXPECT_EQ(oracle::rcc8_classify(a, HyperRectangle{{3, 4}, {3, 4}}), Rcc8::EC);  // corner contact
  EXPECT_EQ(oracle::rcc8_classify(a, HyperRectangle{{2, 4}, {2, 4}}), Rcc8::PO);
  EXPECT_EQ(oracle::rcc8_classify(HyperRectangle{{1, 4}, {1, 4}}, HyperRectangle{{2, 3}, {2, 3}}), Rcc8::NTPPi);
  EXPECT_EQ(oracle::rcc8_classify(HyperRectangle{{1, 2}, {1, 2}}, a), Rcc8::TPP);
  EXPECT_EQ(ascii_name(Rcc8::NTPPi), "NTPPi");
}

TEST(Rcc8Classify, AxisSwapAndConverse) {
  const auto rects = enumerate_rectangles(GridBounds{4, 4});
  for (const auto& r : rects) {
    for (const auto& s : rects) {
      const Rcc8 rel = oracle::rcc8_classify(r, s);
      EXPECT_EQ(oracle::rcc8_classify(swap_axes(r), swap_axes(s)), rel);
      EXPECT_EQ(oracle::rcc8_classify(s, r), converse(rel));
    }
  }
}

TEST(Accessible, NullOperatorIsIdentity) {
  const std::vector<HyperRectangle> refs = {HyperRectangle{{2, 3}, {1, 2}}, HyperRectangle{{1, 2}, {1, 2}}};
  const auto got = oracle::accessible(refs, nullptr, GridBounds{3, 3});
  EXPECT_EQ(got, (std::vector<HyperRectangle>{refs[1], refs[0]}));
}

TEST(BruteForce, Examples) {
  const auto pure = testing::random_windows(1, 6, 3, 1, 2);
  WindowedDataset one_class = pure;
  for (auto& inst : one_class.instances) {
    inst = std::make_shared<const SpatialInstance>(1, 3, 3, inst->values(), 0);
  }
  EXPECT_FALSE(oracle::brute_force_best_decision(one_class.anchored(), LearnerConfig{}).has_value());

  // One candidate: A <= 1.5 on 1x1 data.
  WindowedDataset tab;
  tab.n_attributes = 1;
  tab.d = 1;
  tab.classes = {"a", "b"};
  for (int v : {1, 1, 2, 2}) tab.instances.push_back(testing::make_instance(1, 1, {{double(v)}}, v - 1));
  LearnerConfig cfg;
  cfg.fragment = Fragment::Propositional;
  cfg.comparators = {Comparator::Le};
  cfg.gammas = {Gamma::one()};
  cfg.threshold_policy = ThresholdPolicy::all_midpoints();
  cfg.min_samples_leaf = 1;
  const auto best = oracle::brute_force_best_decision(tab.anchored(), cfg);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(to_text(best->decision), "ATTR_1 <= 1.5");
  EXPECT_DOUBLE_EQ(best->gain, 1.0);
  cfg.min_info_gain = 1.5;
  EXPECT_FALSE(oracle::brute_force_best_decision(tab.anchored(), cfg).has_value());
}

TEST(ReferenceC45, Examples) {
  WindowedDataset tab;
  tab.n_attributes = 1;
  tab.d = 1;
  tab.classes = {"a", "b"};
  for (int v : {1, 2, 3, 4, 5, 11, 12, 13, 14, 15}) {
    tab.instances.push_back(testing::make_instance(1, 1, {{double(v)}}, v > 10 ? 1 : 0));
  }
  LearnerConfig cfg;
  cfg.fragment = Fragment::Propositional;
  const auto tree = oracle::reference_c45(tab.anchored(), cfg);
  EXPECT_EQ(tree.depth(), 1U);
  EXPECT_EQ(tree.leaf_count(), 2U);

  for (auto& inst : tab.instances) inst = testing::make_instance(1, 1, {inst->values()}, 0);
  EXPECT_TRUE(oracle::reference_c45(tab.anchored(), cfg).root().is_leaf());

  EXPECT_THROW(oracle::reference_c45(testing::random_anchored(1, 5, 3, 1, 2), cfg), InvalidArgument);
}

TEST(Containment, Alternation) {
  const auto two = oracle::generate_containment_task(2, 8, 1);
  ASSERT_EQ(two.data.size(), 2U);
  EXPECT_EQ(two.data.labels(), (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(two.data.classes, (std::vector<std::string>{"negative", "positive"}));
  EXPECT_THROW(oracle::generate_containment_task(1, 8, 1), InvalidArgument);
  EXPECT_THROW(oracle::generate_containment_task(4, 3, 1), InvalidArgument);
}

TEST(Containment, SelfConsistent) {
  for (int size : {4, 5, 6, 7, 8, 9, 10, 12, 16}) {
    const auto task = oracle::generate_containment_task(40, size, static_cast<std::uint64_t>(size));
    ASSERT_EQ(task.plants.size(), task.data.size());
    const GridBounds b{size, size};
    for (std::size_t i = 0; i < task.data.size(); ++i) {
      const auto& inst = *task.data.instances[i];
      EXPECT_EQ(inst.label(), i % 2 == 0 ? 1U : 0U);
      EXPECT_EQ(inst.n_attributes(), 2U);
      EXPECT_TRUE(b.contains(task.plants[i].red));
      EXPECT_TRUE(b.contains(task.plants[i].bar));
      EXPECT_TRUE(oracle::verify_plant(inst, task.plants[i])) << "size " << size << " index " << i;
      EXPECT_EQ(oracle::has_containment(inst), inst.label() == 1) << "size " << size << " index " << i;
    }
  }
}

TEST(Containment, DeterministicPerSeed) {
  const auto a = oracle::generate_containment_task(10, 8, 4);
  const auto b = oracle::generate_containment_task(10, 8, 4);
  const auto c = oracle::generate_containment_task(10, 8, 5);
  bool differs = false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    EXPECT_EQ(a.data.instances[i]->values(), b.data.instances[i]->values());
    differs |= a.data.instances[i]->values() != c.data.instances[i]->values();
  }
  EXPECT_TRUE(differs);
}

TEST(ToyScene, Shape) {
  const Scene s = oracle::toy_scene(6, 8, 3, 2, 1);
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.values.size(), 3U * 48U);
  EXPECT_EQ(s.class_names.size(), 2U);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) EXPECT_TRUE(s.label(r, c) == 0 || s.label(r, c) == (c < 4 ? 1 : 2));
  }
}

}  // namespace
}  // namespace sdt
