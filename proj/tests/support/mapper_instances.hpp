#pragma once

// Random mapping instances: a tree, a synthetic per-node score table and a
// prediction string. Score tables alternate between shapes that exercise
// different stages (continuous, few levels, flat, nearly flat).

#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "taxeval/mapper.hpp"
#include "taxeval/measure.hpp"

namespace testsupport {

struct MappingInstance {
  std::unique_ptr<taxeval::TaxonomyTree> tree;
  std::vector<double> scores;
  std::unique_ptr<taxeval::FunctionMeasure> measure;
  std::string prediction;
  taxeval::MapperParams params;
};

inline MappingInstance make_mapping_instance(std::mt19937_64& rng, std::size_t max_nodes = 200) {
  MappingInstance inst;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_nodes)(rng);
  auto records = random_tree_records(rng, n, 3);
  // Long labels (4-5 words) keep whole labels out of short predictions, so
  // the n-gram stages get exercised.
  const bool long_labels = rng() % 3 == 0;
  if (long_labels) {
    for (auto& r : records) {
      r.label = random_phrase(rng, 1) + " " + random_phrase(rng, 1) + " " + random_phrase(rng, 1) + " " +
                random_phrase(rng, 2);
      r.alt_labels.clear();
    }
  }
  inst.tree = std::make_unique<taxeval::TaxonomyTree>(taxeval::TaxonomyTree::from_records(records));

  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int shape = static_cast<int>(rng() % 4);
  inst.scores.resize(n);
  for (auto& s : inst.scores) {
    switch (shape) {
      case 0: s = u(rng); break;
      case 1: s = static_cast<double>(rng() % 3) / 2.0; break;
      case 2: s = 0.25; break;
      default: s = 0.5 + 1e-4 * u(rng); break;
    }
  }
  const auto* scores = &inst.scores;
  inst.measure = std::make_unique<taxeval::FunctionMeasure>(
      *inst.tree, [scores](std::string_view, taxeval::NodeRef v) { return (*scores)[v.index()]; }, "synthetic");

  // Half the predictions use the label vocabulary, so string stages fire;
  // the rest only use unseen words and fall through to voting.
  if (long_labels && rng() % 4 != 0) {
    // A run of 2-4 words from some label plus an unseen word.
    const auto& label = records[rng() % records.size()].label;
    std::vector<std::string> words;
    std::istringstream ws(label);
    for (std::string w; ws >> w;) words.push_back(w);
    const std::size_t len = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, words.size() - 1))(rng);
    const std::size_t from = std::uniform_int_distribution<std::size_t>(0, words.size() - len)(rng);
    for (std::size_t i = from; i < from + len; ++i) inst.prediction += words[i] + " ";
    inst.prediction += "zq" + std::to_string(rng() % 100);
  } else if (rng() % 2 == 0) {
    inst.prediction = random_phrase(rng, 6);
  } else {
    inst.prediction = "zq" + std::to_string(rng() % 100) + " unseen words";
  }
  inst.params.k = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
  inst.params.thr_vote = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
  inst.params.vote_at_least = rng() % 4 == 0;
  inst.params.stem = rng() % 3 != 0;
  return inst;
}

}  // namespace testsupport
