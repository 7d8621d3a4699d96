#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "taxeval/taxonomy.hpp"

namespace taxeval {

// A subclass-of subgraph: (child_id, parent_id) edges, possibly with
// multiple parents per node. Duplicate edges are collapsed on use.
struct EdgeList {
  std::vector<std::pair<std::string, std::string>> edges;
  std::string root_id;
  // Classes dropped (with all their edges) before extraction.
  std::unordered_set<std::string> excluded;
};

struct ExtractionConfig {
  std::uint64_t seed = 0;
  std::vector<std::string> exclude;
};

struct ExtractionStats {
  std::size_t nodes = 0;        // nodes in the output tree
  std::size_t excluded = 0;     // excluded ids that occurred in the graph
  std::size_t unreachable = 0;  // dropped: not reachable from the root
  std::size_t tied = 0;         // nodes whose parent was drawn among tied predecessors
  std::size_t unlabeled = 0;    // nodes without metadata; labelled with their id
};

struct ExtractionResult {
  TaxonomyTree tree;
  ExtractionStats stats;
};

// Keeps, for every node reachable from the root, one predecessor on a
// longest root path, drawing uniformly (seeded) among tied predecessors.
// Exclusions apply first. Throws ConfigError for a missing or excluded root
// and CycleError naming one cycle if the reachable graph is not acyclic.
// Labels come from `metadata` (parent fields ignored). Output records are
// ordered by depth, then id.
ExtractionResult extract_tree(const EdgeList& graph, const ExtractionConfig& config = {},
                              std::span<const NodeRecord> metadata = {});

// Edge count of the longest root-to-v path, after exclusions. Throws
// LookupError if v is not reachable from the root.
std::size_t longest_root_path_length(const EdgeList& graph, std::string_view v,
                                     const ExtractionConfig& config = {});

// "child_id<TAB>parent_id" per line; blank lines skipped.
std::vector<std::pair<std::string, std::string>> read_edges(std::istream& in);
// One id per line; blank lines skipped.
std::vector<std::string> read_id_list(std::istream& in);

}  // namespace taxeval
