#include "taxeval/extract.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <random>
#include <unordered_map>

#include "taxeval/error.hpp"

namespace taxeval {
namespace {

constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

// The reachable part of the graph in topological order.
struct CompiledDag {
  std::vector<std::string> ids;  // sorted
  std::vector<std::vector<std::uint32_t>> parents;
  std::vector<std::vector<std::uint32_t>> children;
  std::vector<bool> reachable;
  std::vector<std::uint32_t> topo;
  std::uint32_t root = kNone;
  std::size_t excluded = 0;
  std::size_t unreachable = 0;

  std::uint32_t find(std::string_view id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    return it != ids.end() && *it == id ? static_cast<std::uint32_t>(it - ids.begin()) : kNone;
  }
};

std::string describe_cycle(const CompiledDag& g, const std::vector<std::size_t>& indegree) {
  // Every unsorted node still has an unsorted reachable parent; following
  // those parents must revisit a node.
  std::uint32_t start = kNone;
  for (auto v = 0u; v < g.ids.size(); ++v) {
    if (g.reachable[v] && indegree[v] > 0) {
      start = v;
      break;
    }
  }
  std::vector<std::uint32_t> walk;
  std::unordered_map<std::uint32_t, std::size_t> seen;
  std::uint32_t v = start;
  while (!seen.contains(v)) {
    seen[v] = walk.size();
    walk.push_back(v);
    for (auto p : g.parents[v]) {
      if (g.reachable[p] && indegree[p] > 0) {
        v = p;
        break;
      }
    }
  }
  std::string msg = "cycle in subclass-of graph: ";
  for (std::size_t i = seen[v]; i < walk.size(); ++i) msg += g.ids[walk[i]] + " -> ";
  return msg + g.ids[v];
}

CompiledDag compile(const EdgeList& graph, const ExtractionConfig& config) {
  std::unordered_set<std::string> excluded = graph.excluded;
  excluded.insert(config.exclude.begin(), config.exclude.end());
  if (excluded.contains(graph.root_id)) throw ConfigError("root '" + graph.root_id + "' is excluded");

  CompiledDag g;
  std::unordered_set<std::string> excluded_seen;
  for (const auto& [child, parent] : graph.edges) {
    if (child.empty() || parent.empty()) throw InputError("edge with an empty id");
    for (const auto* id : {&child, &parent}) {
      if (excluded.contains(*id)) {
        excluded_seen.insert(*id);
      } else {
        g.ids.push_back(*id);
      }
    }
  }
  g.excluded = excluded_seen.size();
  std::sort(g.ids.begin(), g.ids.end());
  g.ids.erase(std::unique(g.ids.begin(), g.ids.end()), g.ids.end());
  g.root = g.find(graph.root_id);
  if (g.root == kNone) throw ConfigError("root '" + graph.root_id + "' does not occur in the edge list");

  const auto n = g.ids.size();
  g.parents.resize(n);
  g.children.resize(n);
  for (const auto& [child, parent] : graph.edges) {
    if (excluded.contains(child) || excluded.contains(parent)) continue;
    auto c = g.find(child);
    auto p = g.find(parent);
    g.parents[c].push_back(p);
    g.children[p].push_back(c);
  }
  for (auto* adj : {&g.parents, &g.children}) {
    for (auto& list : *adj) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  g.reachable.assign(n, false);
  std::deque<std::uint32_t> queue{g.root};
  g.reachable[g.root] = true;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto c : g.children[v]) {
      if (!g.reachable[c]) {
        g.reachable[c] = true;
        queue.push_back(c);
      }
    }
  }
  g.unreachable = static_cast<std::size_t>(std::count(g.reachable.begin(), g.reachable.end(), false));

  // Kahn's algorithm restricted to the reachable subgraph.
  std::vector<std::size_t> indegree(n, 0);
  std::size_t reachable_count = 0;
  for (auto v = 0u; v < n; ++v) {
    if (!g.reachable[v]) continue;
    ++reachable_count;
    for (auto p : g.parents[v]) indegree[v] += g.reachable[p] ? 1 : 0;
  }
  for (auto v = 0u; v < n; ++v) {
    if (g.reachable[v] && indegree[v] == 0) queue.push_back(v);
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    g.topo.push_back(v);
    for (auto c : g.children[v]) {
      if (--indegree[c] == 0) queue.push_back(c);
    }
  }
  if (g.topo.size() != reachable_count) throw CycleError(describe_cycle(g, indegree));
  return g;
}

// Longest root-path length per node (kNone when unreachable); `choose` picks
// the kept parent among the tied best predecessors.
template <typename Choose>
std::vector<std::uint32_t> longest_paths(const CompiledDag& g, std::vector<std::uint32_t>* kept, Choose&& choose) {
  std::vector<std::uint32_t> length(g.ids.size(), kNone);
  std::vector<std::uint32_t> best;
  for (auto v : g.topo) {
    if (v == g.root) {
      length[v] = 0;
      continue;
    }
    best.clear();
    std::uint32_t best_len = 0;
    for (auto p : g.parents[v]) {
      if (!g.reachable[p]) continue;
      if (best.empty() || length[p] + 1 > best_len) {
        best_len = length[p] + 1;
        best.assign(1, p);
      } else if (length[p] + 1 == best_len) {
        best.push_back(p);
      }
    }
    length[v] = best_len;
    if (kept) (*kept)[v] = choose(std::span<const std::uint32_t>(best));
  }
  return length;
}

}  // namespace

ExtractionResult extract_tree(const EdgeList& graph, const ExtractionConfig& config,
                              std::span<const NodeRecord> metadata) {
  const CompiledDag g = compile(graph, config);
  std::mt19937_64 rng(config.seed);
  ExtractionStats stats;
  stats.excluded = g.excluded;
  stats.unreachable = g.unreachable;

  std::vector<std::uint32_t> parent(g.ids.size(), kNone);
  const auto length = longest_paths(g, &parent, [&](std::span<const std::uint32_t> tied) {
    if (tied.size() == 1) return tied[0];
    ++stats.tied;
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    return tied[pick(rng)];
  });

  std::unordered_map<std::string_view, const NodeRecord*> meta;
  for (const auto& r : metadata) meta.emplace(r.id, &r);

  std::vector<std::uint32_t> order(g.topo);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return length[a] != length[b] ? length[a] < length[b] : a < b;
  });
  std::vector<NodeRecord> records;
  records.reserve(order.size());
  for (auto v : order) {
    NodeRecord r;
    r.id = g.ids[v];
    r.parent_id = v == g.root ? std::string() : g.ids[parent[v]];
    if (auto it = meta.find(r.id); it != meta.end()) {
      r.label = it->second->label;
      r.alt_labels = it->second->alt_labels;
    } else {
      r.label = r.id;
      ++stats.unlabeled;
    }
    records.push_back(std::move(r));
  }
  stats.nodes = records.size();
  return {TaxonomyTree::from_records(std::move(records)), stats};
}

std::size_t longest_root_path_length(const EdgeList& graph, std::string_view v, const ExtractionConfig& config) {
  const CompiledDag g = compile(graph, config);
  const auto idx = g.find(v);
  if (idx == kNone || !g.reachable[idx]) {
    throw LookupError("node '" + std::string(v) + "' is not reachable from root '" + graph.root_id + "'");
  }
  const auto length = longest_paths(g, nullptr, [](std::span<const std::uint32_t> t) { return t[0]; });
  return length[idx];
}

std::vector<std::pair<std::string, std::string>> read_edges(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected child_id<TAB>parent_id");
    }
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

std::vector<std::string> read_id_list(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace taxeval
