#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace taxeval {

// Opaque handle for a node, issued by one TaxonomyTree and only meaningful
// there. Files and reports always carry the node's string id instead.
class NodeRef {
 public:
  constexpr NodeRef() = default;
  constexpr explicit NodeRef(std::uint32_t index) : index_(index) {}

  constexpr std::uint32_t index() const { return index_; }
  constexpr bool valid() const {
    return index_ != std::numeric_limits<std::uint32_t>::max();
  }

  friend constexpr auto operator<=>(NodeRef, NodeRef) = default;

 private:
  std::uint32_t index_ = std::numeric_limits<std::uint32_t>::max();
};

// One line of a taxonomy file. An empty parent_id marks the root.
struct NodeRecord {
  std::string id;
  std::string parent_id;
  std::string label;
  std::vector<std::string> alt_labels;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

enum class DiagnosticKind {
  empty,
  duplicate_id,
  multiple_parents,
  no_root,
  multiple_roots,
  orphan,
  cycle,
  empty_id,
  invalid_utf8,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::vector<std::string> ids;
  std::string message;
};

// Every structural violation found in `records`; empty means the records
// form a valid rooted tree.
std::vector<Diagnostic> validate_records(std::span<const NodeRecord> records);

// Immutable rooted tree. All queries are const and safe to call
// concurrently.
class TaxonomyTree {
 public:
  // Throws TaxonomyError listing every diagnostic when the records do not
  // form a tree.
  static TaxonomyTree from_records(std::vector<NodeRecord> records);

  std::size_t size() const { return ids_.size(); }
  NodeRef root() const { return root_; }

  std::optional<NodeRef> find(std::string_view id) const;
  // Like find(), but throws InvalidNode for unknown ids.
  NodeRef at(std::string_view id) const;
  bool contains(NodeRef v) const { return v.index() < ids_.size(); }

  const std::string& id(NodeRef v) const;
  const std::string& label(NodeRef v) const;
  std::span<const std::string> alt_labels(NodeRef v) const;

  // Throws InvalidNode for the root, which has no parent.
  NodeRef parent(NodeRef v) const;
  bool is_root(NodeRef v) const;
  std::span<const NodeRef> children(NodeRef v) const;
  bool is_leaf(NodeRef v) const { return children(v).empty(); }
  std::size_t depth(NodeRef v) const;
  std::size_t max_depth() const { return max_depth_; }

  // Position of the node's id in lexicographic id order; used as the final
  // deterministic tie-break wherever nodes compete.
  std::uint32_t id_rank(NodeRef v) const;

  // Pre-order interval: u is in the subtree of v iff
  // preorder(v) <= preorder(u) < subtree_end(v).
  std::uint32_t preorder(NodeRef v) const;
  std::uint32_t subtree_end(NodeRef v) const;

  std::vector<NodeRef> nodes() const;
  std::vector<NodeRef> leaves() const;

  // Records in original input order, with the root's parent_id empty.
  std::vector<NodeRecord> records() const;

 private:
  TaxonomyTree() = default;
  void check(NodeRef v) const;

  std::vector<std::string> ids_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::string>> alt_labels_;
  std::vector<NodeRef> parents_;
  std::vector<std::vector<NodeRef>> children_;
  std::vector<std::uint32_t> depths_;
  std::vector<std::uint32_t> id_ranks_;
  std::vector<std::uint32_t> preorder_;
  std::vector<std::uint32_t> subtree_end_;
  std::unordered_map<std::string, NodeRef> index_;
  NodeRef root_;
  std::size_t max_depth_ = 0;
};

// [v, parent(v), ..., root].
std::vector<NodeRef> ancestors(const TaxonomyTree& tree, NodeRef v);

std::size_t depth(const TaxonomyTree& tree, NodeRef v);

// Deepest node shared by both ancestor lists.
NodeRef lca(const TaxonomyTree& tree, NodeRef u, NodeRef v);

// Length of the undirected path between u and v.
std::size_t node_distance(const TaxonomyTree& tree, NodeRef u, NodeRef v);

// True when a lies on the path from v to the root (v itself included).
bool is_ancestor(const TaxonomyTree& tree, NodeRef a, NodeRef v);

// Canonical label first, then alternates; duplicates dropped, order kept.
std::vector<std::string> all_labels(const TaxonomyTree& tree, NodeRef v);

}  // namespace taxeval
