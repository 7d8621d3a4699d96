#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support/generators.hpp"
#include "taxeval/error.hpp"
#include "taxeval/hmetrics.hpp"

using namespace taxeval;

namespace {

// Set-intersection oracle over explicit ancestor lists.
std::pair<double, double> oracle(const TaxonomyTree& t, NodeRef gt, NodeRef pr) {
  auto ag = ancestors(t, gt);
  auto ap = ancestors(t, pr);
  std::set<NodeRef> sg(ag.begin(), ag.end());
  std::size_t shared = 0;
  for (auto v : ap) shared += sg.contains(v);
  return {static_cast<double>(shared) / ap.size(), static_cast<double>(shared) / ag.size()};
}

}  // namespace

TEST(HMetrics, AncestorPrediction) {
  auto t = testsupport::chain(4);  // root c1 c2 c3
  auto s = pair_score(t, t.at("c3"), t.at("c2"));
  EXPECT_EQ(s.hp(), 1.0);
  EXPECT_EQ(s.hr(), 0.75);
}

TEST(HMetrics, SiblingBranch) {
  auto t = TaxonomyTree::from_records(
      {{"root", "", "r", {}}, {"x", "root", "x", {}}, {"y", "x", "y", {}}, {"gt", "y", "g", {}}, {"pr", "x", "p", {}}});
  auto s = pair_score(t, t.at("gt"), t.at("pr"));
  EXPECT_EQ(s.overlap, 2u);
  EXPECT_EQ(s.hp(), 2.0 / 3.0);
  EXPECT_EQ(s.hr(), 0.5);
}

TEST(HMetrics, Identity) {
  std::mt19937_64 rng(1);
  auto t = testsupport::random_tree(rng, 30);
  for (auto v : t.nodes()) {
    auto s = pair_score(t, v, v);
    EXPECT_EQ(s.hp(), 1.0);
    EXPECT_EQ(s.hr(), 1.0);
  }
}

TEST(HMetrics, PropertiesOnRandomTrees) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = testsupport::random_tree(rng, 5 + 4 * trial);
    for (auto gt : t.nodes()) {
      for (auto pr : t.nodes()) {
        auto s = pair_score(t, gt, pr);
        auto [hp, hr] = oracle(t, gt, pr);
        ASSERT_DOUBLE_EQ(s.hp(), hp);
        ASSERT_DOUBLE_EQ(s.hr(), hr);
        EXPECT_GT(s.hp(), 0.0);
        EXPECT_GT(s.hr(), 0.0);
        // hp < hr exactly when pr is deeper than gt.
        EXPECT_EQ(s.hp() < s.hr(), t.depth(pr) > t.depth(gt));
        if (is_ancestor(t, pr, gt)) EXPECT_EQ(s.hp(), 1.0);
        if (pr == t.root()) {
          EXPECT_EQ(s.hp(), 1.0);
          EXPECT_EQ(s.hr(), 1.0 / static_cast<double>(t.depth(gt) + 1));
        }
      }
    }
  }
}

// A leaf gt does not bound hp from below by hr once leaves sit at
// different depths.
TEST(HMetrics, LeafGroundTruthCounterexample) {
  auto t = TaxonomyTree::from_records(
      {{"root", "", "r", {}}, {"gt", "root", "g", {}}, {"a", "root", "a", {}}, {"pr", "a", "p", {}}});
  auto s = pair_score(t, t.at("gt"), t.at("pr"));
  EXPECT_DOUBLE_EQ(s.hp(), 1.0 / 3.0);
  EXPECT_EQ(s.hr(), 0.5);
}

TEST(HMetrics, LeafGroundTruthDominatesOnUniformDepthTrees) {
  for (std::size_t b = 2; b <= 4; ++b) {
    auto t = testsupport::balanced(b, 3);
    for (auto gt : t.leaves()) {
      for (auto pr : t.nodes()) {
        auto s = pair_score(t, gt, pr);
        ASSERT_GE(s.hp(), s.hr());
      }
    }
  }
}

TEST(HMetrics, AggregateIsMeanThenHarmonic) {
  auto t = testsupport::chain(4);
  std::vector<std::pair<NodeRef, NodeRef>> pairs{{t.at("c3"), t.at("c3")}, {t.at("c1"), t.at("c3")}};
  auto a = aggregate(t, pairs);
  EXPECT_EQ(a.n, 2u);
  EXPECT_EQ(a.hp_mean, 0.75);  // 1.0 and 0.5
  EXPECT_EQ(a.hr_mean, 1.0);
  EXPECT_DOUBLE_EQ(a.hf, 2 * 0.75 / 1.75);

  std::vector<std::pair<NodeRef, NodeRef>> one{{t.at("c3"), t.at("c2")}};
  auto b = aggregate(t, one);
  EXPECT_EQ(b.hp_mean, 1.0);
  EXPECT_EQ(b.hr_mean, 0.75);
  EXPECT_DOUBLE_EQ(b.hf, harmonic_mean(1.0, 0.75));
}

TEST(HMetrics, AggregateMatchesBruteForceAndBounds) {
  std::mt19937_64 rng(3);
  auto t = testsupport::random_tree(rng, 80);
  auto nodes = t.nodes();
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  std::vector<std::pair<NodeRef, NodeRef>> pairs;
  double hp = 0, hr = 0;
  for (int i = 0; i < 100; ++i) {
    pairs.emplace_back(nodes[pick(rng)], nodes[pick(rng)]);
    auto [p, r] = oracle(t, pairs.back().first, pairs.back().second);
    hp += p;
    hr += r;
  }
  auto a = aggregate(t, pairs);
  EXPECT_NEAR(a.hp_mean, hp / 100, 1e-12);
  EXPECT_NEAR(a.hr_mean, hr / 100, 1e-12);
  EXPECT_GE(a.hf, std::min(a.hp_mean, a.hr_mean));
  EXPECT_LE(a.hf, std::max(a.hp_mean, a.hr_mean));
}

TEST(HMetrics, EmptyAggregateThrows) {
  std::vector<PairScore> none;
  EXPECT_THROW(aggregate(none), EmptyInputError);
}
