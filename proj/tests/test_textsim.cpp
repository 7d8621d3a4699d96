#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "support/generators.hpp"
#include "taxeval/error.hpp"
#include "taxeval/textsim.hpp"

using namespace taxeval;

namespace {

NormalizedText N(const std::string& s, bool stem = false) { return normalize(s, stem); }

struct Fixture {
  std::string ref, pred;
  double rouge1, bleu2, meteor;
};

std::vector<Fixture> load_fixtures() {
  std::ifstream in(TAXEVAL_TEST_DATA "/textsim_fixtures.tsv");
  std::vector<Fixture> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    Fixture f;
    std::string r1, b2, m;
    std::getline(ls, f.ref, '\t');
    std::getline(ls, f.pred, '\t');
    std::getline(ls, r1, '\t');
    std::getline(ls, b2, '\t');
    std::getline(ls, m, '\t');
    f.rouge1 = std::stod(r1);
    f.bleu2 = std::stod(b2);
    f.meteor = std::stod(m);
    out.push_back(f);
  }
  return out;
}

}  // namespace

// Values computed independently with exact rationals (see
// tests/data/make_textsim_fixtures.py).
TEST(TextSim, FrozenFixtures) {
  auto fixtures = load_fixtures();
  ASSERT_GE(fixtures.size(), 10u);
  for (const auto& f : fixtures) {
    EXPECT_NEAR(rouge1(N(f.ref), N(f.pred)), f.rouge1, 1e-9) << f.ref << " | " << f.pred;
    EXPECT_NEAR(bleu2(N(f.ref), N(f.pred)), f.bleu2, 1e-9) << f.ref << " | " << f.pred;
    EXPECT_NEAR(meteor_like(N(f.ref), N(f.pred)), f.meteor, 1e-9) << f.ref << " | " << f.pred;
  }
}

TEST(TextSim, ExactMatch) {
  EXPECT_EQ(exact_match(N("pine tree"), N("pine tree")), 1.0);
  EXPECT_EQ(exact_match(N("pine"), N("pine tree")), 0.0);
  EXPECT_EQ(exact_match(N("pines", true), N("pine", true)), 1.0);
  EXPECT_EQ(exact_match(N(""), N("")), 0.0);
}

TEST(TextSim, ContainedSwiftChain) {
  EXPECT_EQ(contained(N("collared swift"), N("chestnut-collared swift")), 1.0);
  EXPECT_EQ(contained(N("swift"), N("collared swift")), 1.0);
  EXPECT_EQ(contained(N("oak"), N("pine tree")), 0.0);
  EXPECT_EQ(contained(N("seal"), N("sealion")), 0.0);  // whole tokens only
  EXPECT_EQ(contained(N(""), N("anything")), 0.0);
}

TEST(TextSim, ImplicationChainOnRandomPairs) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 2000; ++i) {
    auto label = N(testsupport::random_phrase(rng, 2));
    auto pred = N(testsupport::random_phrase(rng, 4));
    if (i % 5 == 0) pred = label;
    if (i % 7 == 0) pred = N(testsupport::random_phrase(rng, 2) + " " + label.joined);
    if (exact_match(label, pred) == 1.0) EXPECT_EQ(contained(label, pred), 1.0);
    if (contained(label, pred) == 1.0) EXPECT_EQ(rouge1(label, pred), 1.0);
  }
}

TEST(TextSim, RougeRecall) {
  EXPECT_EQ(rouge1(N("seal"), N("gray seal")), 1.0);
  EXPECT_EQ(rouge1(N("gray seal"), N("seal")), 0.5);
  EXPECT_THROW(rouge1(N(""), N("seal")), UndefinedMeasure);
}

TEST(TextSim, RougeMatchesMultisetOracle) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 50; ++i) {
    auto ref = N(testsupport::random_phrase(rng, 6));
    auto pred = N(testsupport::random_phrase(rng, 6));
    std::map<std::string, int> rc, pc;
    for (const auto& t : ref.tokens) ++rc[t];
    for (const auto& t : pred.tokens) ++pc[t];
    int hits = 0;
    for (const auto& [t, c] : rc) hits += std::min(c, pc[t]);
    EXPECT_DOUBLE_EQ(rouge1(ref, pred), static_cast<double>(hits) / ref.tokens.size());
  }
}

TEST(TextSim, BleuEdgeCases) {
  EXPECT_EQ(bleu2(N("gray seal"), N("gray seal")), 1.0);
  EXPECT_EQ(bleu2(N("seal"), N("seal")), 1.0);
  EXPECT_EQ(bleu2(N(""), N("seal")), 0.0);
  EXPECT_EQ(bleu2(N("seal"), N("")), 0.0);
  // No shared tokens: only the smoothing terms remain.
  for (std::size_t r = 1; r <= 4; ++r) {
    for (std::size_t c = 1; c <= 4; ++c) {
      std::string ref, pred;
      for (std::size_t i = 0; i < r; ++i) ref += "a" + std::string(i + 1, 'x') + " ";
      for (std::size_t i = 0; i < c; ++i) pred += "b" + std::string(i + 1, 'y') + " ";
      const double p1 = 1.0 / (c + 1.0);
      const double p2 = 1.0 / (c - 1.0 + 1.0);
      const double bp = c > r ? 1.0 : std::exp(1.0 - double(r) / double(c));
      EXPECT_NEAR(bleu2(N(ref), N(pred)), bp * std::sqrt(p1 * p2), 1e-12) << r << "," << c;
    }
  }
}

TEST(TextSim, MeteorProperties) {
  for (std::size_t m = 1; m <= 6; ++m) {
    std::string s;
    for (std::size_t i = 0; i < m; ++i) s += "w" + std::to_string(i) + " ";
    EXPECT_NEAR(meteor_like(N(s), N(s)), 1.0 - 0.5 * std::pow(1.0 / m, 3), 1e-12);
  }
  EXPECT_EQ(meteor_like(N("pine tree"), N("oak leaf")), 0.0);
  EXPECT_LT(meteor_like(N("white oak tree"), N("tree oak white")), meteor_like(N("white oak tree"), N("white oak tree")));
  // Stem stage aligns "seals" with "seal".
  EXPECT_GT(meteor_like(N("harbor seal"), N("harbor seals")), 0.4);
}

TEST(TextSim, RangeAndPurity) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    auto a = N(testsupport::random_phrase(rng, 5), i % 2);
    auto b = N(testsupport::random_phrase(rng, 5), i % 2);
    for (double v : {exact_match(a, b), contained(a, b), rouge1(a, b), bleu2(a, b), meteor_like(a, b)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(bleu2(a, b), bleu2(a, b));
    EXPECT_EQ(exact_match(a, b), exact_match(b, a));
  }
}

TEST(TextSim, TemplatesAgreeOnIntegerTokens) {
  std::vector<int> ref{1, 2, 3}, pred{1, 2};
  EXPECT_NEAR(bleu2<int>(ref, pred), 0.60653065971263342360, 1e-12);
  EXPECT_NEAR(rouge1<int>(ref, pred), 2.0 / 3.0, 1e-15);
}
