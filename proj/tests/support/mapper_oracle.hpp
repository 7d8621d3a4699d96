#pragma once

// Straight-line transliteration of the published mapping pseudocode, kept
// deliberately naive (string n-grams, full sorts, ancestor lists rebuilt per
// call). Differences from the literal pseudocode are the documented
// decisions: equal-depth hits go to the smaller id, the top-k sort breaks
// score ties by id, votes are keyed by absolute depth with the deepest
// qualifying node winning (then the higher count, then the smaller id), and
// empty labels never match.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "taxeval/mapper.hpp"
#include "taxeval/measure.hpp"
#include "taxeval/taxonomy.hpp"
#include "taxeval/text.hpp"

namespace testsupport {

using taxeval::NodeRef;
using taxeval::TaxonomyTree;

inline std::vector<NodeRef> oracle_anc(const TaxonomyTree& t, NodeRef v) {
  std::vector<NodeRef> out{v};
  while (!t.is_root(out.back())) out.push_back(t.parent(out.back()));
  return out;
}

inline std::set<std::string> oracle_ngrams(const std::vector<std::string>& toks, std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string g;
    for (std::size_t j = i; j < i + n; ++j) g += (j == i ? "" : " ") + toks[j];
    out.insert(g);
  }
  return out;
}

struct OracleResult {
  NodeRef node;
  std::string stage;
};

inline OracleResult oracle_map(const TaxonomyTree& t, const taxeval::SimilarityMeasure& m, const std::string& pred,
                               const taxeval::MapperParams& p) {
  struct Entry {
    double score;
    NodeRef v;
  };
  std::vector<Entry> S;
  for (auto v : t.nodes()) S.push_back({m.score(pred, v), v});
  std::sort(S.begin(), S.end(), [&](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return t.id(a.v) < t.id(b.v);
  });
  const std::size_t k = std::min(p.k, S.size());
  std::vector<double> Sk;
  double z = 0;
  for (std::size_t i = 0; i < k; ++i) z += std::exp(S[i].score);
  for (std::size_t i = 0; i < k; ++i) Sk.push_back(std::exp(S[i].score) / z);

  auto more_specific = [&](NodeRef a, NodeRef b) {
    auto da = oracle_anc(t, a).size();
    auto db = oracle_anc(t, b).size();
    return da != db ? da > db : t.id(a) < t.id(b);
  };
  const auto P = taxeval::normalize(pred, p.stem);

  auto scan = [&](auto hit, const std::string& name) -> std::optional<OracleResult> {
    std::optional<NodeRef> cand;
    for (std::size_t idx = 0; idx < S.size(); ++idx) {
      NodeRef v = S[idx].v;
      if (hit(v) && (!cand || more_specific(v, *cand))) cand = v;
      if (cand && idx == k - 1) return OracleResult{*cand, name + "-topk"};
    }
    if (cand) return OracleResult{*cand, name + "-global"};
    return std::nullopt;
  };

  auto contains = [&](NodeRef v) {
    if (P.empty()) return false;
    for (const auto& l : taxeval::all_labels(t, v)) {
      auto L = taxeval::normalize(l, p.stem);
      if (!L.empty() && P.joined.find(L.joined) != std::string::npos) return true;
    }
    return false;
  };
  if (auto r = scan(contains, "contains")) {
    r->stage = r->stage == "contains-topk" ? "topk-contains" : "global-contains";
    return *r;
  }
  for (std::size_t n : {4, 3, 2}) {
    const auto pg = oracle_ngrams(P.tokens, n);
    auto hit = [&](NodeRef v) {
      for (const auto& l : taxeval::all_labels(t, v)) {
        for (const auto& g : oracle_ngrams(taxeval::normalize(l, p.stem).tokens, n)) {
          if (pg.contains(g)) return true;
        }
      }
      return false;
    };
    if (auto r = scan(hit, "ngram-" + std::to_string(n))) return *r;
  }

  if (k >= 2 && Sk[0] - Sk[1] < p.thr_top2 && Sk[0] - Sk[k - 1] < p.thr_topk) {
    std::map<std::size_t, std::map<std::string, std::size_t>> votes;  // depth -> id -> count
    for (std::size_t i = 0; i < k; ++i) {
      for (auto a : oracle_anc(t, S[i].v)) votes[oracle_anc(t, a).size() - 1][t.id(a)] += 1;
    }
    for (auto it = votes.rbegin(); it != votes.rend(); ++it) {
      std::string best;
      std::size_t best_count = 0;
      for (const auto& [id, count] : it->second) {
        const bool ok = p.vote_at_least ? count >= p.thr_vote : count > p.thr_vote;
        if (ok && count > best_count) {
          best = id;
          best_count = count;
        }
      }
      if (best_count > 0) return {t.at(best), "vote"};
    }
  }
  return {S[0].v, "fallback"};
}

}  // namespace testsupport
