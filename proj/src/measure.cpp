#include "taxeval/measure.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "taxeval/error.hpp"
#include "taxeval/textsim.hpp"

namespace taxeval {

std::optional<MeasureKind> parse_measure_kind(std::string_view name) {
  if (name == "exact") return MeasureKind::exact;
  if (name == "contained") return MeasureKind::contained;
  if (name == "bleu2") return MeasureKind::bleu2;
  if (name == "rouge1") return MeasureKind::rouge1;
  if (name == "meteor") return MeasureKind::meteor;
  if (name == "embed-cosine") return MeasureKind::embed_cosine;
  if (name == "pairwise") return MeasureKind::pairwise;
  return std::nullopt;
}

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::exact: return "exact";
    case MeasureKind::contained: return "contained";
    case MeasureKind::bleu2: return "bleu2";
    case MeasureKind::rouge1: return "rouge1";
    case MeasureKind::meteor: return "meteor";
    case MeasureKind::embed_cosine: return "embed-cosine";
    case MeasureKind::pairwise: return "pairwise";
  }
  return "unknown";
}

bool stems_by_default(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::exact:
    case MeasureKind::contained:
    case MeasureKind::rouge1:
    case MeasureKind::bleu2:
      return true;
    default:
      return false;
  }
}

double score_text(MeasureKind kind, const NormalizedText& reference, const NormalizedText& prediction) {
  switch (kind) {
    case MeasureKind::exact: return exact_match(reference, prediction);
    case MeasureKind::contained: return contained(reference, prediction);
    case MeasureKind::rouge1: return rouge1(reference, prediction);
    case MeasureKind::bleu2: return bleu2(reference, prediction);
    case MeasureKind::meteor: return meteor_like(reference, prediction);
    default: throw ConfigError("score_text: '" + std::string(to_string(kind)) + "' is not a text measure");
  }
}

void FunctionMeasure::score_all(std::string_view prediction, std::span<double> out) const {
  for (std::uint32_t i = 0; i < tree_.size(); ++i) out[i] = fn_(prediction, NodeRef(i));
}

namespace {

using Ids = std::span<const std::int32_t>;

// Labels of every node, pre-normalized and interned to integer ids so the
// per-prediction loop compares small integer arrays.
class TextMeasure final : public SimilarityMeasure {
 public:
  TextMeasure(const TaxonomyTree& tree, MeasureKind kind, bool stem)
      : tree_(tree), kind_(kind), stem_(kind == MeasureKind::meteor ? false : stem) {
    node_begin_.push_back(0);
    label_begin_.push_back(0);
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
      for (const auto& label : all_labels(tree, NodeRef(i))) {
        auto text = normalize(label, stem_);
        if (text.empty()) continue;
        for (const auto& tok : text.tokens) {
          tokens_.push_back(intern(tok));
          if (kind_ == MeasureKind::meteor) stems_.push_back(intern(porter_stem(tok)));
        }
        label_begin_.push_back(static_cast<std::uint32_t>(tokens_.size()));
      }
      node_begin_.push_back(static_cast<std::uint32_t>(label_begin_.size() - 1));
    }
  }

  std::string name() const override {
    return std::string(to_string(kind_)) + (stem_ ? "+stem" : "");
  }

  double score(std::string_view prediction, NodeRef node) const override {
    if (!tree_.contains(node)) throw InvalidNode("invalid node reference");
    const auto p = prepare(prediction);
    return score_node(node.index(), p);
  }

  void score_all(std::string_view prediction, std::span<double> out) const override {
    const auto p = prepare(prediction);
    for (std::uint32_t i = 0; i < tree_.size(); ++i) out[i] = score_node(i, p);
  }

 private:
  struct Prepared {
    std::vector<std::int32_t> tokens;
    std::vector<std::int32_t> stems;
  };

  std::int32_t intern(const std::string& tok) {
    auto [it, inserted] = vocab_.emplace(tok, static_cast<std::int32_t>(vocab_.size()));
    return it->second;
  }

  std::int32_t lookup(const std::string& tok) const {
    auto it = vocab_.find(tok);
    return it == vocab_.end() ? -1 : it->second;
  }

  Prepared prepare(std::string_view text) const {
    Prepared p;
    for (const auto& tok : normalize(text, stem_).tokens) {
      p.tokens.push_back(lookup(tok));
      if (kind_ == MeasureKind::meteor) p.stems.push_back(lookup(porter_stem(tok)));
    }
    return p;
  }

  double score_label(std::uint32_t l, const Prepared& p) const {
    const auto b = label_begin_[l];
    const auto n = label_begin_[l + 1] - b;
    Ids ref(tokens_.data() + b, n);
    Ids pred(p.tokens);
    switch (kind_) {
      case MeasureKind::exact: return exact_match(ref, pred);
      case MeasureKind::contained: return contained(ref, pred);
      case MeasureKind::rouge1: return rouge1(ref, pred);
      case MeasureKind::bleu2: return bleu2(ref, pred);
      case MeasureKind::meteor: return meteor_like(ref, Ids(stems_.data() + b, n), pred, Ids(p.stems));
      default: return 0.0;
    }
  }

  double score_node(std::uint32_t i, const Prepared& p) const {
    double best = 0.0;
    for (auto l = node_begin_[i]; l < node_begin_[i + 1]; ++l) best = std::max(best, score_label(l, p));
    return best;
  }

  const TaxonomyTree& tree_;
  MeasureKind kind_;
  bool stem_;
  std::unordered_map<std::string, std::int32_t> vocab_;
  std::vector<std::int32_t> tokens_;
  std::vector<std::int32_t> stems_;
  std::vector<std::uint32_t> label_begin_;
  std::vector<std::uint32_t> node_begin_;
};

// Prediction vectors are looked up by the raw prediction text, node vectors
// by node id.
class EmbeddingMeasure final : public SimilarityMeasure {
 public:
  EmbeddingMeasure(const TaxonomyTree& tree, const EmbeddingTable& table)
      : tree_(tree), table_(table), nodes_(static_cast<Eigen::Index>(tree.size()), table.dim()) {
    std::size_t missing = 0;
    std::string first_missing;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
      const auto& id = tree.id(NodeRef(i));
      if (auto r = table.find(id)) {
        nodes_.row(i) = table.row(*r);
      } else if (missing++ == 0) {
        first_missing = id;
      }
    }
    if (missing > 0) {
      throw LookupError("embedding table lacks vectors for " + std::to_string(missing) +
                        " node(s), e.g. '" + first_missing + "'");
    }
  }

  std::string name() const override { return "embed-cosine"; }

  double score(std::string_view prediction, NodeRef node) const override {
    if (!tree_.contains(node)) throw InvalidNode("invalid node reference");
    return cosine_to_unit(nodes_.row(node.index()).dot(table_.at(prediction)));
  }

  void score_all(std::string_view prediction, std::span<double> out) const override {
    Eigen::Map<Eigen::VectorXd> dst(out.data(), static_cast<Eigen::Index>(out.size()));
    dst.noalias() = nodes_ * table_.at(prediction).transpose();
    dst = dst.unaryExpr([](double x) { return cosine_to_unit(x); });
  }

 private:
  const TaxonomyTree& tree_;
  const EmbeddingTable& table_;
  EmbeddingTable::Matrix nodes_;
};

class PairwiseMeasure final : public SimilarityMeasure {
 public:
  PairwiseMeasure(const TaxonomyTree& tree, const PairwiseScores& scores) : tree_(tree), scores_(scores) {}

  std::string name() const override { return "pairwise"; }

  double score(std::string_view prediction, NodeRef node) const override {
    return scores_.at(prediction, tree_.id(node));
  }

  void score_all(std::string_view prediction, std::span<double> out) const override {
    for (std::uint32_t i = 0; i < tree_.size(); ++i) out[i] = score(prediction, NodeRef(i));
  }

 private:
  const TaxonomyTree& tree_;
  const PairwiseScores& scores_;
};

}  // namespace

std::unique_ptr<SimilarityMeasure> make_measure(const TaxonomyTree& tree, MeasureKind kind,
                                                const MeasureOptions& options) {
  switch (kind) {
    case MeasureKind::embed_cosine:
      if (options.embeddings == nullptr) throw ConfigError("measure embed-cosine requires an embedding table");
      return std::make_unique<EmbeddingMeasure>(tree, *options.embeddings);
    case MeasureKind::pairwise:
      if (options.pairwise == nullptr) throw ConfigError("measure pairwise requires a pairwise score file");
      return std::make_unique<PairwiseMeasure>(tree, *options.pairwise);
    default:
      return std::make_unique<TextMeasure>(tree, kind, options.stem.value_or(stems_by_default(kind)));
  }
}

}  // namespace taxeval
