#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "taxeval/embedding.hpp"
#include "taxeval/taxonomy.hpp"
#include "taxeval/text.hpp"

namespace taxeval {

enum class MeasureKind { exact, contained, bleu2, rouge1, meteor, embed_cosine, pairwise };

std::optional<MeasureKind> parse_measure_kind(std::string_view name);
std::string_view to_string(MeasureKind kind);

// Exact, Contained, ROUGE1 and BLEU2 compare stemmed text by default.
bool stems_by_default(MeasureKind kind);

// Score a prediction against one label. `reference` and `prediction` must
// have been normalized with the same stemming choice; for meteor, unstemmed.
// Only the text kinds are accepted.
double score_text(MeasureKind kind, const NormalizedText& reference, const NormalizedText& prediction);

// Scores predictions against every node of one tree. A node's score is the
// maximum over its canonical and alternate labels.
class SimilarityMeasure {
 public:
  virtual ~SimilarityMeasure() = default;

  virtual std::string name() const = 0;
  virtual double score(std::string_view prediction, NodeRef node) const = 0;
  // out[i] receives the score against NodeRef(i); out.size() == tree.size().
  virtual void score_all(std::string_view prediction, std::span<double> out) const = 0;
};

struct MeasureOptions {
  // Defaults to stems_by_default(kind) for text measures.
  std::optional<bool> stem;
  // embed_cosine: prediction text and node ids are keys into this table.
  const EmbeddingTable* embeddings = nullptr;
  // pairwise: (prediction text, node id) are the keys.
  const PairwiseScores* pairwise = nullptr;
};

// The tree (and any table in `options`) must outlive the measure.
std::unique_ptr<SimilarityMeasure> make_measure(const TaxonomyTree& tree, MeasureKind kind,
                                                const MeasureOptions& options = {});

// Wraps an arbitrary scoring function; used for synthetic and adversarial
// score patterns.
class FunctionMeasure : public SimilarityMeasure {
 public:
  using Fn = std::function<double(std::string_view, NodeRef)>;

  FunctionMeasure(const TaxonomyTree& tree, Fn fn, std::string name = "function")
      : tree_(tree), fn_(std::move(fn)), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  double score(std::string_view prediction, NodeRef node) const override { return fn_(prediction, node); }
  void score_all(std::string_view prediction, std::span<double> out) const override;

 private:
  const TaxonomyTree& tree_;
  Fn fn_;
  std::string name_;
};

}  // namespace taxeval
