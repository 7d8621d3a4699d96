#include "taxeval/taxonomy.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "taxeval/error.hpp"
#include "taxeval/text.hpp"

namespace taxeval {

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::empty: return "empty";
    case DiagnosticKind::duplicate_id: return "duplicate-id";
    case DiagnosticKind::multiple_parents: return "multiple-parents";
    case DiagnosticKind::no_root: return "no-root";
    case DiagnosticKind::multiple_roots: return "multiple-roots";
    case DiagnosticKind::orphan: return "orphan";
    case DiagnosticKind::cycle: return "cycle";
    case DiagnosticKind::empty_id: return "empty-id";
    case DiagnosticKind::invalid_utf8: return "invalid-utf8";
  }
  return "unknown";
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

}  // namespace

std::vector<Diagnostic> validate_records(std::span<const NodeRecord> records) {
  std::vector<Diagnostic> out;
  if (records.empty()) {
    out.push_back({DiagnosticKind::empty, {}, "taxonomy has no nodes"});
    return out;
  }

  // First occurrence of each id wins; later lines are reported.
  std::unordered_map<std::string_view, std::size_t> first;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id.empty()) {
      out.push_back({DiagnosticKind::empty_id, {}, "record " + std::to_string(i + 1) + " has an empty id"});
      continue;
    }
    bool utf8 = is_valid_utf8(r.id) && is_valid_utf8(r.parent_id) && is_valid_utf8(r.label);
    for (const auto& alt : r.alt_labels) utf8 = utf8 && is_valid_utf8(alt);
    if (!utf8) {
      out.push_back({DiagnosticKind::invalid_utf8, {r.id}, "node has a field that is not valid UTF-8"});
    }
    auto [it, inserted] = first.emplace(r.id, i);
    if (!inserted) {
      const auto& prev = records[it->second];
      if (prev.parent_id != r.parent_id) {
        out.push_back({DiagnosticKind::multiple_parents, {r.id},
                       "node " + r.id + " has multiple parents: '" + prev.parent_id + "' and '" +
                           r.parent_id + "'"});
      } else {
        out.push_back({DiagnosticKind::duplicate_id, {r.id}, "duplicate id " + r.id});
      }
      continue;
    }
    kept.push_back(i);
  }

  std::vector<std::string> roots;
  for (std::size_t i : kept) {
    const auto& r = records[i];
    if (r.parent_id.empty()) {
      roots.push_back(r.id);
    } else if (r.parent_id == r.id) {
      out.push_back({DiagnosticKind::cycle, {r.id}, "node " + r.id + " is its own parent"});
    } else if (!first.contains(r.parent_id)) {
      out.push_back({DiagnosticKind::orphan, {r.id, r.parent_id},
                     "node " + r.id + " references missing parent " + r.parent_id});
    }
  }
  if (roots.empty()) {
    out.push_back({DiagnosticKind::no_root, {}, "no root (every node has a parent)"});
  } else if (roots.size() > 1) {
    out.push_back({DiagnosticKind::multiple_roots, roots, "multiple roots: " + join_ids(roots)});
  }

  // Walk every parent chain; chains that loop back on themselves are cycles.
  // state: 0 unvisited, 1 on current chain, 2 resolved.
  std::unordered_map<std::string_view, int> state;
  std::unordered_set<std::string_view> reported;
  for (std::size_t i : kept) {
    std::vector<std::string_view> chain;
    std::string_view cur = records[i].id;
    while (true) {
      int& s = state[cur];
      if (s == 2) break;
      if (s == 1) {
        // cur closes a loop; the loop is the chain suffix starting at cur.
        auto start = std::find(chain.begin(), chain.end(), cur);
        std::vector<std::string> cycle(start, chain.end());
        if (cycle.size() > 1 && !reported.contains(cur)) {
          for (const auto& id : cycle) reported.insert(records[first.at(id)].id);
          cycle.push_back(std::string(cur));
          std::string msg = "parent cycle: ";
          for (std::size_t k = 0; k < cycle.size(); ++k) {
            if (k) msg += " -> ";
            msg += cycle[k];
          }
          cycle.pop_back();
          out.push_back({DiagnosticKind::cycle, cycle, msg});
        }
        break;
      }
      s = 1;
      chain.push_back(cur);
      const auto& rec = records[first.at(cur)];
      if (rec.parent_id.empty() || rec.parent_id == rec.id || !first.contains(rec.parent_id)) break;
      cur = rec.parent_id;
    }
    for (auto id : chain) state[id] = 2;
  }
  return out;
}

TaxonomyTree TaxonomyTree::from_records(std::vector<NodeRecord> records) {
  if (auto diags = validate_records(records); !diags.empty()) {
    std::string msg = "invalid taxonomy:";
    for (const auto& d : diags) msg += "\n  " + std::string(to_string(d.kind)) + ": " + d.message;
    throw TaxonomyError(msg);
  }

  TaxonomyTree t;
  const auto n = records.size();
  t.ids_.reserve(n);
  t.labels_.reserve(n);
  t.alt_labels_.reserve(n);
  for (auto& r : records) {
    t.index_.emplace(r.id, NodeRef(static_cast<std::uint32_t>(t.ids_.size())));
    t.ids_.push_back(std::move(r.id));
    t.labels_.push_back(std::move(r.label));
    t.alt_labels_.push_back(std::move(r.alt_labels));
  }
  t.parents_.assign(n, NodeRef{});
  t.children_.assign(n, {});
  for (std::uint32_t i = 0; i < n; ++i) {
    if (records[i].parent_id.empty()) {
      t.root_ = NodeRef(i);
    } else {
      NodeRef p = t.index_.at(records[i].parent_id);
      t.parents_[i] = p;
      t.children_[p.index()].push_back(NodeRef(i));
    }
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return t.ids_[a] < t.ids_[b]; });
  t.id_ranks_.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) t.id_ranks_[order[r]] = r;

  // Children in id order so traversal-derived data is independent of file order.
  for (auto& c : t.children_) {
    std::sort(c.begin(), c.end(),
              [&](NodeRef a, NodeRef b) { return t.id_ranks_[a.index()] < t.id_ranks_[b.index()]; });
  }

  t.depths_.assign(n, 0);
  t.preorder_.assign(n, 0);
  t.subtree_end_.assign(n, 0);
  std::uint32_t clock = 0;
  // Iterative DFS: (node, next child position).
  std::vector<std::pair<NodeRef, std::size_t>> stack{{t.root_, 0}};
  t.preorder_[t.root_.index()] = clock++;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& kids = t.children_[v.index()];
    if (next < kids.size()) {
      NodeRef c = kids[next++];
      t.depths_[c.index()] = t.depths_[v.index()] + 1;
      t.max_depth_ = std::max<std::size_t>(t.max_depth_, t.depths_[c.index()]);
      t.preorder_[c.index()] = clock++;
      stack.emplace_back(c, 0);
    } else {
      t.subtree_end_[v.index()] = clock;
      stack.pop_back();
    }
  }
  return t;
}

void TaxonomyTree::check(NodeRef v) const {
  if (!contains(v)) throw InvalidNode("invalid node reference");
}

std::optional<NodeRef> TaxonomyTree::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeRef TaxonomyTree::at(std::string_view id) const {
  if (auto v = find(id)) return *v;
  throw InvalidNode("unknown node id '" + std::string(id) + "'");
}

const std::string& TaxonomyTree::id(NodeRef v) const {
  check(v);
  return ids_[v.index()];
}

const std::string& TaxonomyTree::label(NodeRef v) const {
  check(v);
  return labels_[v.index()];
}

std::span<const std::string> TaxonomyTree::alt_labels(NodeRef v) const {
  check(v);
  return alt_labels_[v.index()];
}

NodeRef TaxonomyTree::parent(NodeRef v) const {
  check(v);
  if (v == root_) throw InvalidNode("the root has no parent");
  return parents_[v.index()];
}

bool TaxonomyTree::is_root(NodeRef v) const {
  check(v);
  return v == root_;
}

std::span<const NodeRef> TaxonomyTree::children(NodeRef v) const {
  check(v);
  return children_[v.index()];
}

std::size_t TaxonomyTree::depth(NodeRef v) const {
  check(v);
  return depths_[v.index()];
}

std::uint32_t TaxonomyTree::id_rank(NodeRef v) const {
  check(v);
  return id_ranks_[v.index()];
}

std::uint32_t TaxonomyTree::preorder(NodeRef v) const {
  check(v);
  return preorder_[v.index()];
}

std::uint32_t TaxonomyTree::subtree_end(NodeRef v) const {
  check(v);
  return subtree_end_[v.index()];
}

std::vector<NodeRef> TaxonomyTree::nodes() const {
  std::vector<NodeRef> out;
  out.reserve(size());
  for (std::uint32_t i = 0; i < size(); ++i) out.emplace_back(i);
  return out;
}

std::vector<NodeRef> TaxonomyTree::leaves() const {
  std::vector<NodeRef> out;
  for (std::uint32_t i = 0; i < size(); ++i) {
    if (children_[i].empty()) out.emplace_back(i);
  }
  return out;
}

std::vector<NodeRecord> TaxonomyTree::records() const {
  std::vector<NodeRecord> out;
  out.reserve(size());
  for (std::uint32_t i = 0; i < size(); ++i) {
    NodeRef v(i);
    out.push_back({ids_[i], v == root_ ? std::string() : ids_[parents_[i].index()], labels_[i],
                   alt_labels_[i]});
  }
  return out;
}

std::vector<NodeRef> ancestors(const TaxonomyTree& tree, NodeRef v) {
  std::vector<NodeRef> out;
  out.reserve(tree.depth(v) + 1);
  out.push_back(v);
  while (!tree.is_root(v)) {
    v = tree.parent(v);
    out.push_back(v);
  }
  return out;
}

std::size_t depth(const TaxonomyTree& tree, NodeRef v) { return tree.depth(v); }

NodeRef lca(const TaxonomyTree& tree, NodeRef u, NodeRef v) {
  auto du = tree.depth(u);
  auto dv = tree.depth(v);
  while (du > dv) {
    u = tree.parent(u);
    --du;
  }
  while (dv > du) {
    v = tree.parent(v);
    --dv;
  }
  while (u != v) {
    u = tree.parent(u);
    v = tree.parent(v);
  }
  return u;
}

std::size_t node_distance(const TaxonomyTree& tree, NodeRef u, NodeRef v) {
  return tree.depth(u) + tree.depth(v) - 2 * tree.depth(lca(tree, u, v));
}

bool is_ancestor(const TaxonomyTree& tree, NodeRef a, NodeRef v) {
  return tree.preorder(a) <= tree.preorder(v) && tree.preorder(v) < tree.subtree_end(a);
}

std::vector<std::string> all_labels(const TaxonomyTree& tree, NodeRef v) {
  std::vector<std::string> out{tree.label(v)};
  for (const auto& alt : tree.alt_labels(v)) {
    if (std::find(out.begin(), out.end(), alt) == out.end()) out.push_back(alt);
  }
  return out;
}

}  // namespace taxeval
