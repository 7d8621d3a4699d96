#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "taxeval/taxonomy.hpp"

namespace taxeval {

// Per-pair terms, kept as integer counts so ratios are exact until the
// final division.
struct PairScore {
  std::size_t overlap = 0;    // |anc(pr) ∩ anc(gt)|
  std::size_t pred_size = 0;  // |anc(pr)|
  std::size_t gt_size = 0;    // |anc(gt)|

  double hp() const { return static_cast<double>(overlap) / static_cast<double>(pred_size); }
  double hr() const { return static_cast<double>(overlap) / static_cast<double>(gt_size); }
  // Diagnostic only; the reported hF is built from dataset means.
  double f1() const { return 2.0 * static_cast<double>(overlap) / static_cast<double>(pred_size + gt_size); }
};

struct AggregateScore {
  double hp_mean = 0.0;
  double hr_mean = 0.0;
  double hf = 0.0;
  std::size_t n = 0;
};

PairScore pair_score(const TaxonomyTree& tree, NodeRef gt, NodeRef pr);

// Arithmetic means of per-pair hP and hR (summed in input order), and hF as
// their harmonic mean. Throws EmptyInputError for no pairs.
AggregateScore aggregate(std::span<const PairScore> scores);
AggregateScore aggregate(const TaxonomyTree& tree, std::span<const std::pair<NodeRef, NodeRef>> pairs);

double harmonic_mean(double a, double b);

}  // namespace taxeval
