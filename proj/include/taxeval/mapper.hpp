#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taxeval/error.hpp"
#include "taxeval/measure.hpp"
#include "taxeval/taxonomy.hpp"

namespace taxeval {

struct MapperParams {
  // Candidates considered by the top-k checks and by voting.
  std::size_t k = 10;
  // Ambiguity thresholds on the softmax of the top-k scores.
  double thr_topk = 0.0015;
  double thr_top2 = 0.001;
  // A voted ancestor needs more than thr_vote occurrences...
  std::size_t thr_vote = 4;
  // ...or at least thr_vote when this is set.
  bool vote_at_least = false;
  // Stem prediction and labels before the substring and n-gram checks.
  bool stem = true;
};

// Parses "k=10,thr_topk=0.0015,thr_top2=0.001,thr_vote=4[,vote_at_least=0][,stem=1]";
// unspecified keys keep their defaults. Throws ConfigError.
MapperParams parse_mapper_params(std::string_view text, MapperParams base = {});
std::string format_mapper_params(const MapperParams& params);

enum class MappingStage {
  topk_contains,
  global_contains,
  ngram4_topk,
  ngram4_global,
  ngram3_topk,
  ngram3_global,
  ngram2_topk,
  ngram2_global,
  vote,
  fallback,
};

std::string_view to_string(MappingStage stage);

struct ScoredNode {
  NodeRef node;
  double score = 0.0;
  double softmax = 0.0;
};

struct MappingTrace {
  MappingStage stage = MappingStage::fallback;
  NodeRef chosen;
  // Top-k candidates, best first.
  std::vector<ScoredNode> topk;
};

// Raised by batch mapping when any item fails; carries every failure.
class BatchMappingError : public InputError {
 public:
  BatchMappingError(std::string message, std::vector<std::pair<std::size_t, std::string>> failures)
      : InputError(std::move(message)), failures_(std::move(failures)) {}
  const std::vector<std::pair<std::size_t, std::string>>& failures() const { return failures_; }

 private:
  std::vector<std::pair<std::size_t, std::string>> failures_;
};

// Maps free-text predictions onto nodes: verbatim label containment, then
// shared word 4-, 3- and 2-grams (each first within the top-k candidates,
// then over the whole taxonomy), then an ancestor vote when the top scores
// are ambiguous, and finally the best-scoring node. Whenever several nodes
// qualify the deepest wins, ties going to the smaller id.
//
// Label preprocessing happens once at construction; map() is const and
// thread-safe provided the measure is.
class Mapper {
 public:
  Mapper(const TaxonomyTree& tree, const SimilarityMeasure& measure, MapperParams params = {});

  MappingTrace map(std::string_view prediction) const;

  // Order-preserving; results do not depend on `workers`.
  std::vector<MappingTrace> map_batch(std::span<const std::string> predictions, std::size_t workers = 1) const;

  const MapperParams& params() const { return params_; }

 private:
  struct Label {
    std::string joined;
    std::vector<std::int32_t> tokens;
  };

  bool more_specific(std::uint32_t a, std::uint32_t b) const;
  bool contains_hit(std::uint32_t node, const std::string& pred) const;
  bool ngram_hit(std::uint32_t node, std::span<const std::int32_t> pred, std::size_t n) const;

  const TaxonomyTree& tree_;
  const SimilarityMeasure& measure_;
  MapperParams params_;
  std::vector<std::vector<Label>> labels_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> rank_;
  std::unordered_map<std::string, std::int32_t> vocab_;
};

MappingTrace map_prediction(const TaxonomyTree& tree, const SimilarityMeasure& measure,
                            std::string_view prediction, const MapperParams& params = {});

std::vector<MappingTrace> batch_map(const TaxonomyTree& tree, const SimilarityMeasure& measure,
                                    std::span<const std::string> predictions,
                                    const MapperParams& params = {}, std::size_t workers = 1);

}  // namespace taxeval
