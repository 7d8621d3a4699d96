#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "support/generators.hpp"
#include "taxeval/error.hpp"
#include "taxeval/taxonomy.hpp"
#include "taxeval/taxonomy_io.hpp"

using namespace taxeval;

namespace {

bool has_kind(const std::vector<Diagnostic>& d, DiagnosticKind k) {
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.kind == k; });
}

std::vector<NodeRecord> base() {
  return {{"root", "", "root", {}}, {"a", "root", "A", {}}, {"b", "a", "B", {}},
          {"c", "b", "C", {}},      {"d", "a", "D", {}},    {"e", "root", "E", {"e2"}}};
}

std::string records_to_tsv(const std::vector<NodeRecord>& r) {
  std::ostringstream os;
  write_node_records(os, r, TaxonomyFormat::tsv);
  return os.str();
}

}  // namespace

TEST(Validate, AcceptsTree) { EXPECT_TRUE(validate_records(base()).empty()); }

TEST(Validate, TwoRootsNamed) {
  auto r = base();
  r.push_back({"other", "", "other", {}});
  auto d = validate_records(r);
  ASSERT_TRUE(has_kind(d, DiagnosticKind::multiple_roots));
  auto it = std::find_if(d.begin(), d.end(), [](auto& x) { return x.kind == DiagnosticKind::multiple_roots; });
  EXPECT_EQ(it->ids, (std::vector<std::string>{"root", "other"}));
  EXPECT_THROW(TaxonomyTree::from_records(r), TaxonomyError);
}

struct Mutation {
  const char* name;
  DiagnosticKind expected;
  std::function<void(std::vector<NodeRecord>&)> apply;
};

// Each mutation plants one defect into a valid taxonomy.
TEST(Validate, MutationFixturesFlagTheirDefect) {
  const std::vector<Mutation> mutations = {
      {"duplicate id", DiagnosticKind::duplicate_id, [](auto& r) { r.push_back(r[3]); }},
      {"second parent", DiagnosticKind::multiple_parents, [](auto& r) { r.push_back({"c", "e", "C", {}}); }},
      {"extra root", DiagnosticKind::multiple_roots, [](auto& r) { r[5].parent_id = ""; }},
      {"orphan", DiagnosticKind::orphan, [](auto& r) { r[4].parent_id = "ghost"; }},
      {"two-node cycle", DiagnosticKind::cycle, [](auto& r) { r[2].parent_id = "c"; }},
      {"long cycle", DiagnosticKind::cycle, [](auto& r) { r[1].parent_id = "c"; }},
      {"self parent", DiagnosticKind::cycle, [](auto& r) { r[4].parent_id = "d"; }},
      {"no root", DiagnosticKind::no_root, [](auto& r) { r[0].parent_id = "e"; }},
      {"empty id", DiagnosticKind::empty_id, [](auto& r) { r.push_back({"", "a", "x", {}}); }},
      {"bad utf-8", DiagnosticKind::invalid_utf8, [](auto& r) { r[3].label = "\xc3\x28"; }},
      {"empty file", DiagnosticKind::empty, [](auto& r) { r.clear(); }},
  };
  for (const auto& m : mutations) {
    auto r = base();
    m.apply(r);
    auto d = validate_records(r);
    EXPECT_TRUE(has_kind(d, m.expected)) << m.name;
    EXPECT_THROW(TaxonomyTree::from_records(r), TaxonomyError) << m.name;
  }
}

TEST(Validate, CycleMessageNamesCycle) {
  auto r = base();
  r[2].parent_id = "c";  // b -> c -> b
  auto d = validate_records(r);
  auto it = std::find_if(d.begin(), d.end(), [](auto& x) { return x.kind == DiagnosticKind::cycle; });
  ASSERT_NE(it, d.end());
  EXPECT_NE(it->message.find("b -> c -> b"), std::string::npos) << it->message;
}

TEST(TaxonomyIo, TsvRoundTripIsByteIdentical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto text = records_to_tsv(testsupport::random_tree_records(rng, 30));
    std::istringstream in(text);
    auto tree = TaxonomyTree::from_records(read_node_records(in, TaxonomyFormat::tsv));
    EXPECT_EQ(records_to_tsv(tree.records()), text);
  }
}

TEST(TaxonomyIo, JsonlRoundTripIsByteIdentical) {
  std::mt19937_64 rng(4);
  auto records = testsupport::random_tree_records(rng, 25);
  records[0].label = "Gr\xc3\xa4ser \"quoted\"";
  std::ostringstream os;
  write_node_records(os, records, TaxonomyFormat::jsonl);
  std::istringstream in(os.str());
  auto back = read_node_records(in, TaxonomyFormat::jsonl);
  EXPECT_EQ(back, records);
  std::ostringstream again;
  write_node_records(again, back, TaxonomyFormat::jsonl);
  EXPECT_EQ(again.str(), os.str());
}

TEST(TaxonomyIo, SaveLoadThroughFilesAndSniffing) {
  auto dir = std::filesystem::temp_directory_path() / "taxeval_io_test";
  std::filesystem::create_directories(dir);
  auto tree = TaxonomyTree::from_records(base());
  for (const char* name : {"t.tsv", "t.jsonl"}) {
    auto path = (dir / name).string();
    save_taxonomy(path, tree, format_for_path(path));
    auto loaded = load_taxonomy(path);
    EXPECT_EQ(loaded.records(), tree.records()) << name;
  }
}

TEST(TaxonomyIo, ParsesVariants) {
  std::istringstream tsv("root\t\tRoot\na\troot\tA\talt one|alt two\n\nb\troot\tB\t\n");
  auto r = read_node_records(tsv, TaxonomyFormat::tsv);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1].alt_labels, (std::vector<std::string>{"alt one", "alt two"}));
  EXPECT_TRUE(r[2].alt_labels.empty());

  std::istringstream jsonl(R"({"id":"root","parent_id":null,"label":"R"}
{"id":"a","parent_id":"root","label":"A","alt_labels":["x"]})");
  auto j = read_node_records(jsonl, TaxonomyFormat::jsonl);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0].parent_id, "");
  EXPECT_EQ(j[1].alt_labels, std::vector<std::string>{"x"});
}

TEST(TaxonomyIo, ParseErrorsCarryLineNumbers) {
  std::istringstream bad("root\t\tRoot\nonly-one-field\n");
  try {
    read_node_records(bad, TaxonomyFormat::tsv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream badjson("{\"id\": 3}\n");
  EXPECT_THROW(read_node_records(badjson, TaxonomyFormat::jsonl), ParseError);
}

TEST(TaxonomyIo, RefusesUnwritableTsv) {
  std::vector<NodeRecord> r{{"root", "", "has\ttab", {}}};
  std::ostringstream os;
  EXPECT_THROW(write_node_records(os, r, TaxonomyFormat::tsv), InputError);
}
