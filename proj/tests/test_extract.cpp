#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support/generators.hpp"
#include "taxeval/error.hpp"
#include "taxeval/extract.hpp"
#include "taxeval/taxonomy_io.hpp"

using namespace taxeval;

namespace {

EdgeList graph(std::vector<std::pair<std::string, std::string>> edges, std::string root = "root") {
  return {std::move(edges), std::move(root), {}};
}

std::string serialize(const TaxonomyTree& t) {
  std::ostringstream os;
  write_node_records(os, t.records(), TaxonomyFormat::tsv);
  return os.str();
}

}  // namespace

TEST(Extract, DiamondKeepsLongestPath) {
  auto g = graph({{"a", "root"}, {"c", "a"}, {"b", "root"}, {"b2", "b"}, {"c", "b2"}});
  auto t = extract_tree(g).tree;
  EXPECT_EQ(t.id(t.parent(t.at("c"))), "b2");
  EXPECT_EQ(t.depth(t.at("c")), 3u);
  EXPECT_EQ(longest_root_path_length(g, "c"), 3u);
  EXPECT_EQ(longest_root_path_length(g, "root"), 0u);
}

TEST(Extract, ChainIsUnchanged) {
  auto g = graph({{"c", "b"}, {"b", "a"}, {"a", "root"}});
  auto t = extract_tree(g).tree;
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(t.id(t.parent(t.at("c"))), "b");
  EXPECT_EQ(t.id(t.parent(t.at("b"))), "a");
  EXPECT_EQ(t.id(t.parent(t.at("a"))), "root");
}

TEST(Extract, RandomDagDepthsMatchEnumeration) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = testsupport::random_dag(rng, 2 + trial % 19);
    auto expected = testsupport::enumerate_longest_paths(g);
    auto result = extract_tree(g, {static_cast<std::uint64_t>(trial), {}});
    ASSERT_EQ(result.tree.size(), expected.size());
    for (const auto& [id, len] : expected) {
      EXPECT_EQ(result.tree.depth(result.tree.at(id)), len) << id;
      EXPECT_EQ(longest_root_path_length(g, id), len) << id;
    }
  }
}

TEST(Extract, SymmetricTieIsUniform) {
  auto g = graph({{"a", "root"}, {"b", "root"}, {"c", "a"}, {"c", "b"}});
  int via_a = 0;
  const int runs = 4000;
  for (int seed = 0; seed < runs; ++seed) {
    auto t = extract_tree(g, {static_cast<std::uint64_t>(seed), {}}).tree;
    via_a += t.id(t.parent(t.at("c"))) == "a";
  }
  EXPECT_NEAR(static_cast<double>(via_a) / runs, 0.5, 0.05);
}

TEST(Extract, SeedDeterminesOutputBytes) {
  std::mt19937_64 rng(5);
  auto g = testsupport::random_dag(rng, 40, 0.4);
  EXPECT_EQ(serialize(extract_tree(g, {99, {}}).tree), serialize(extract_tree(g, {99, {}}).tree));
}

TEST(Extract, ExclusionsBreakCycles) {
  // x <-> y cycle through the abstract class y.
  auto g = graph({{"x", "root"}, {"y", "x"}, {"x", "y"}, {"z", "x"}});
  try {
    extract_tree(g);
    FAIL() << "expected a cycle error";
  } catch (const CycleError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("x"), std::string::npos);
    EXPECT_NE(msg.find("y"), std::string::npos);
  }
  auto result = extract_tree(g, {0, {"y"}});
  EXPECT_EQ(result.tree.size(), 3u);
  EXPECT_EQ(result.stats.excluded, 1u);
  EXPECT_FALSE(result.tree.find("y"));
}

TEST(Extract, RootProblemsAreConfigErrors) {
  auto g = graph({{"a", "root"}});
  EXPECT_THROW(extract_tree(graph({{"a", "root"}}, "missing")), ConfigError);
  EXPECT_THROW(extract_tree(g, {0, {"root"}}), ConfigError);
}

TEST(Extract, UnreachableNodesAreDroppedAndCounted) {
  auto g = graph({{"a", "root"}, {"island", "elsewhere"}});
  auto result = extract_tree(g);
  EXPECT_EQ(result.tree.size(), 2u);
  EXPECT_EQ(result.stats.unreachable, 2u);
  EXPECT_THROW(longest_root_path_length(g, "island"), LookupError);
  EXPECT_THROW(longest_root_path_length(g, "nowhere"), LookupError);
}

TEST(Extract, OutputNodesAreReachableMinusExcluded) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = testsupport::random_dag(rng, 15);
    g.edges.emplace_back("stray", "d" + std::to_string(trial % 15 + 100));  // parent not in graph
    ExtractionConfig cfg{1, {"d3"}};
    auto r = extract_tree(g, cfg);
    auto reach = testsupport::enumerate_longest_paths({g.edges, g.root_id, {"d3"}});
    EXPECT_EQ(r.tree.size(), reach.size());
    for (const auto& [id, len] : reach) EXPECT_TRUE(r.tree.find(id)) << id;
  }
}

TEST(Extract, LabelsComeFromMetadata) {
  auto g = graph({{"a", "root"}, {"b", "a"}});
  std::vector<NodeRecord> meta{{"a", "ignored", "Alpha", {"first"}}, {"root", "", "Root", {}}};
  auto r = extract_tree(g, {}, meta);
  EXPECT_EQ(r.tree.label(r.tree.at("a")), "Alpha");
  EXPECT_EQ(r.tree.alt_labels(r.tree.at("a")).size(), 1u);
  EXPECT_EQ(r.tree.label(r.tree.at("b")), "b");
  EXPECT_EQ(r.stats.unlabeled, 1u);
  EXPECT_EQ(r.tree.records()[0].id, "root");
}

TEST(Extract, ReadsEdgeFiles) {
  std::istringstream in("a\troot\r\n\nb\ta\n");
  auto edges = read_edges(in);
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0], (std::pair<std::string, std::string>{"a", "root"}));
  std::istringstream bad("a root\n");
  EXPECT_THROW(read_edges(bad), ParseError);
  std::istringstream ids("x\n\ny\n");
  EXPECT_EQ(read_id_list(ids), (std::vector<std::string>{"x", "y"}));
}
