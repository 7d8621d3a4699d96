#include "taxeval/synthbench.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "format.hpp"
#include "taxeval/error.hpp"
#include "taxeval/hmetrics.hpp"
#include "taxeval/measure.hpp"
#include "taxeval/text.hpp"

namespace taxeval {
namespace {

constexpr std::size_t kMaxRedraws = 1000;

// Nodes grouped by depth, each group sorted by preorder, so the nodes of a
// given depth inside a subtree form one contiguous slice.
class DepthIndex {
 public:
  explicit DepthIndex(const TaxonomyTree& tree) : tree_(tree), by_pre_(tree.size()) {
    by_depth_.resize(tree.max_depth() + 1);
    for (auto v : tree.nodes()) by_pre_[tree.preorder(v)] = v;
    for (auto v : by_pre_) by_depth_[tree.depth(v)].push_back(tree.preorder(v));
  }

  // Index range in by_depth_[depth] of the subtree of v.
  std::pair<std::size_t, std::size_t> slice(std::size_t depth, NodeRef v) const {
    if (depth >= by_depth_.size()) return {0, 0};
    const auto& list = by_depth_[depth];
    auto lo = std::lower_bound(list.begin(), list.end(), tree_.preorder(v));
    auto hi = std::lower_bound(lo, list.end(), tree_.subtree_end(v));
    return {static_cast<std::size_t>(lo - list.begin()), static_cast<std::size_t>(hi - list.begin())};
  }

  NodeRef at(std::size_t depth, std::size_t i) const { return by_pre_[by_depth_[depth][i]]; }

 private:
  const TaxonomyTree& tree_;
  std::vector<NodeRef> by_pre_;
  std::vector<std::vector<std::uint32_t>> by_depth_;
};

// Nodes at distance d from leaf `path[0]`: for each ancestor a = path[j]
// (j >= 1), the nodes d - j levels below a that are not under path[j - 1].
struct Segment {
  std::size_t depth;
  std::size_t lo, hi;  // slice of a excluding the slice of the child on the path
  std::size_t cut_lo, cut_hi;
  std::size_t size() const { return (hi - lo) - (cut_hi - cut_lo); }
};

std::vector<Segment> segments_at(const TaxonomyTree& tree, const DepthIndex& index, std::span<const NodeRef> path,
                                 std::size_t d) {
  std::vector<Segment> out;
  for (std::size_t j = 1; j <= std::min(d, path.size() - 1); ++j) {
    const std::size_t depth = tree.depth(path[j]) + (d - j);
    auto [lo, hi] = index.slice(depth, path[j]);
    auto [cut_lo, cut_hi] = index.slice(depth, path[j - 1]);
    if (cut_lo == cut_hi) cut_lo = cut_hi = lo;
    Segment s{depth, lo, hi, cut_lo, cut_hi};
    if (s.size() > 0) out.push_back(s);
  }
  return out;
}

NodeRef pick(const DepthIndex& index, std::span<const Segment> segments, std::size_t r) {
  for (const auto& s : segments) {
    if (r >= s.size()) {
      r -= s.size();
      continue;
    }
    const std::size_t before = s.cut_lo - s.lo;
    return index.at(s.depth, r < before ? s.lo + r : s.cut_hi + (r - before));
  }
  throw std::logic_error("pair sampler: candidate index out of range");
}

std::string require_string(const nlohmann::json& j, const char* key, std::size_t lineno) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ParseError("line " + std::to_string(lineno) + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

double require_number(const nlohmann::json& j, const char* key, std::size_t lineno) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw ParseError("line " + std::to_string(lineno) + ": missing numeric field '" + key + "'");
  }
  return it->get<double>();
}

template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) f(i);
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
}

TauCell correlate(std::span<const double> scores, std::span<const PairSample> samples,
                  std::span<const std::size_t> idx, PairMode target) {
  TauCell cell;
  cell.n = idx.size();
  if (idx.empty()) {
    cell.error = "no " + std::string(to_string(target)) + "-mode samples";
    return cell;
  }
  std::vector<double> xs, ys;
  xs.reserve(idx.size());
  ys.reserve(idx.size());
  for (auto i : idx) {
    xs.push_back(scores[i]);
    ys.push_back(target == PairMode::hp ? samples[i].hp : samples[i].hr);
  }
  try {
    cell.result = kendall_tau(xs, ys);
  } catch (const UndefinedMeasure& e) {
    cell.error = e.what();
  } catch (const InputError& e) {
    cell.error = e.what();
  }
  return cell;
}

nlohmann::ordered_json cell_json(const TauCell& cell) {
  nlohmann::ordered_json j;
  j["n"] = cell.n;
  if (cell.result) {
    j["tau"] = cell.result->tau;
    j["p_value"] = cell.result->p_value;
  } else {
    j["tau"] = nullptr;
    j["p_value"] = nullptr;
  }
  if (!cell.error.empty()) j["error"] = cell.error;
  return j;
}

nlohmann::ordered_json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (auto [d, c] : h) j[std::to_string(d)] = c;
  return j;
}

}  // namespace

std::string_view to_string(PairMode mode) { return mode == PairMode::hp ? "hp" : "hr"; }

PairMode parse_pair_mode(std::string_view text) {
  if (text == "hp") return PairMode::hp;
  if (text == "hr") return PairMode::hr;
  throw ConfigError("pair mode must be 'hp' or 'hr', got '" + std::string(text) + "'");
}

std::vector<PairSample> sample_pairs(const TaxonomyTree& tree, std::size_t n, std::size_t max_dist, PairMode mode,
                                     std::uint64_t seed) {
  if (max_dist == 0) throw ConfigError("max_dist must be at least 1");
  std::vector<NodeRef> leaves;
  for (auto v : tree.leaves()) {
    if (tree.depth(v) >= 1) leaves.push_back(v);
  }
  if (leaves.empty()) throw ConfigError("taxonomy has no leaf below the root; no pair can be sampled");

  const DepthIndex index(tree);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_leaf(0, leaves.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_dist(1, max_dist);

  std::vector<PairSample> out;
  out.reserve(n);
  while (out.size() < n) {
    const NodeRef ref = leaves[pick_leaf(rng)];
    const auto path = ancestors(tree, ref);
    NodeRef cand;
    std::size_t d = 0;
    for (std::size_t attempt = 0; attempt < kMaxRedraws && !cand.valid(); ++attempt) {
      d = pick_dist(rng);
      if (mode == PairMode::hr) {
        if (d < path.size()) cand = path[d];
        continue;
      }
      const auto segments = segments_at(tree, index, path, d);
      std::size_t total = 0;
      for (const auto& s : segments) total += s.size();
      if (total == 0) continue;
      cand = pick(index, segments, std::uniform_int_distribution<std::size_t>(0, total - 1)(rng));
    }
    if (!cand.valid()) continue;

    const PairScore score = pair_score(tree, ref, cand);
    out.push_back({tree.id(ref), tree.label(ref), tree.id(cand), tree.label(cand), d, score.hp(), score.hr(),
                   mode});
  }
  return out;
}

std::map<std::size_t, std::size_t> distance_histogram(std::span<const PairSample> samples) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& s : samples) ++h[s.distance];
  return h;
}

void write_pairs(std::ostream& out, std::span<const PairSample> samples) {
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["reference"] = s.reference_id;
    j["reference_label"] = s.reference_label;
    j["candidate"] = s.candidate_id;
    j["candidate_label"] = s.candidate_label;
    j["distance"] = s.distance;
    j["mode"] = to_string(s.mode);
    j["hp"] = s.hp;
    j["hr"] = s.hr;
    out << j.dump() << '\n';
  }
}

std::vector<PairSample> read_pairs(std::istream& in) {
  std::vector<PairSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("line " + std::to_string(lineno) + ": expected a JSON object");
    PairSample s;
    s.reference_id = require_string(j, "reference", lineno);
    s.reference_label = require_string(j, "reference_label", lineno);
    s.candidate_id = require_string(j, "candidate", lineno);
    s.candidate_label = require_string(j, "candidate_label", lineno);
    const double d = require_number(j, "distance", lineno);
    if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
      throw ParseError("line " + std::to_string(lineno) + ": distance must be a non-negative integer");
    }
    s.distance = static_cast<std::size_t>(d);
    try {
      s.mode = parse_pair_mode(require_string(j, "mode", lineno));
    } catch (const ConfigError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    s.hp = require_number(j, "hp", lineno);
    s.hr = require_number(j, "hr", lineno);
    out.push_back(std::move(s));
  }
  return out;
}

PairMeasure make_pair_measure(std::string_view name, const PairMeasureSources& sources) {
  const std::string n(name);
  if (name == "hp") return {n, [](const PairSample& s) { return s.hp; }};
  if (name == "hr") return {n, [](const PairSample& s) { return s.hr; }};
  if (name == "neg-distance") return {n, [](const PairSample& s) { return -static_cast<double>(s.distance); }};
  if (name == "constant") return {n, [](const PairSample&) { return 0.0; }};

  const auto kind = parse_measure_kind(name);
  if (!kind) throw ConfigError("unknown measure '" + n + "'");
  switch (*kind) {
    case MeasureKind::embed_cosine: {
      if (!sources.embeddings) throw ConfigError("measure embed-cosine needs an embedding table");
      const auto* table = sources.embeddings;
      return {n, [table](const PairSample& s) { return embed_cosine(*table, s.reference_id, s.candidate_id); }};
    }
    case MeasureKind::pairwise: {
      if (!sources.pairwise) throw ConfigError("measure pairwise needs a pairwise-score file");
      const auto* scores = sources.pairwise;
      return {n, [scores](const PairSample& s) { return scores->at(s.reference_id, s.candidate_id); }};
    }
    default: {
      const bool stem = stems_by_default(*kind);
      const MeasureKind k = *kind;
      return {n, [k, stem](const PairSample& s) {
                return score_text(k, normalize(s.reference_label, stem), normalize(s.candidate_label, stem));
              }};
    }
  }
}

CorrelationReport run_correlation(std::span<const PairSample> samples, std::span<const PairMeasure> measures,
                                  std::size_t workers) {
  if (samples.empty()) throw EmptyInputError("no pair samples");
  CorrelationReport report;
  std::vector<std::size_t> hp_idx, hr_idx;
  std::vector<PairSample> hp_samples, hr_samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].mode == PairMode::hp) {
      hp_idx.push_back(i);
      hp_samples.push_back(samples[i]);
    } else {
      hr_idx.push_back(i);
      hr_samples.push_back(samples[i]);
    }
  }
  report.hp_samples = hp_idx.size();
  report.hr_samples = hr_idx.size();
  report.hp_distances = distance_histogram(hp_samples);
  report.hr_distances = distance_histogram(hr_samples);

  std::vector<double> scores(samples.size());
  std::vector<std::string> errors(samples.size());
  for (const auto& m : measures) {
    std::fill(errors.begin(), errors.end(), std::string());
    parallel_for(samples.size(), workers, [&](std::size_t i) {
      try {
        scores[i] = m.score(samples[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    std::size_t failed = 0;
    std::string msg;
    for (const auto& e : errors) {
      if (e.empty()) continue;
      if (++failed <= 10) msg += "\n  " + e;
    }
    if (failed > 0) {
      if (failed > 10) msg += "\n  ... and " + std::to_string(failed - 10) + " more";
      throw LookupError("measure " + m.name + " could not score " + std::to_string(failed) + " pair(s):" + msg);
    }
    report.measures.push_back({m.name, correlate(scores, samples, hp_idx, PairMode::hp),
                               correlate(scores, samples, hr_idx, PairMode::hr)});
  }
  return report;
}

void write_correlation_json(std::ostream& out, const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["tau_variant"] = "tau-b";
  j["p_value_method"] = "normal approximation (approximate)";
  j["samples"] = {{"hp", report.hp_samples}, {"hr", report.hr_samples}};
  j["distance_histogram"] = {{"hp", histogram_json(report.hp_distances)},
                             {"hr", histogram_json(report.hr_distances)}};
  j["measures"] = nlohmann::ordered_json::array();
  for (const auto& m : report.measures) {
    nlohmann::ordered_json row;
    row["measure"] = m.measure;
    row["tau_hp"] = cell_json(m.hp);
    row["tau_hr"] = cell_json(m.hr);
    j["measures"].push_back(std::move(row));
  }
  out << j.dump(2) << '\n';
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
  out << "measure,target,n,tau,p_value,error\n";
  for (const auto& m : report.measures) {
    for (auto [target, cell] : {std::pair{"hp", &m.hp}, std::pair{"hr", &m.hr}}) {
      out << detail::csv_field(m.measure) << ',' << target << ',' << cell->n << ',';
      if (cell->result) out << detail::format_double(cell->result->tau) << ',' << detail::format_double(cell->result->p_value);
      else out << ',';
      out << ',' << detail::csv_field(cell->error) << '\n';
    }
  }
}

}  // namespace taxeval
