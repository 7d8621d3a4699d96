#include "taxeval/hmetrics.hpp"

#include <vector>

#include "taxeval/error.hpp"

namespace taxeval {

PairScore pair_score(const TaxonomyTree& tree, NodeRef gt, NodeRef pr) {
  // Both ancestor sets are root paths, so they share exactly the path from
  // the root to the LCA.
  return {tree.depth(lca(tree, gt, pr)) + 1, tree.depth(pr) + 1, tree.depth(gt) + 1};
}

double harmonic_mean(double a, double b) {
  return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
}

AggregateScore aggregate(std::span<const PairScore> scores) {
  if (scores.empty()) throw EmptyInputError("cannot aggregate an empty list of pairs");
  double hp = 0.0;
  double hr = 0.0;
  for (const auto& s : scores) {
    hp += s.hp();
    hr += s.hr();
  }
  const double n = static_cast<double>(scores.size());
  AggregateScore out;
  out.n = scores.size();
  out.hp_mean = hp / n;
  out.hr_mean = hr / n;
  out.hf = harmonic_mean(out.hp_mean, out.hr_mean);
  return out;
}

AggregateScore aggregate(const TaxonomyTree& tree, std::span<const std::pair<NodeRef, NodeRef>> pairs) {
  std::vector<PairScore> scores;
  scores.reserve(pairs.size());
  for (const auto& [gt, pr] : pairs) scores.push_back(pair_score(tree, gt, pr));
  return aggregate(scores);
}

}  // namespace taxeval
