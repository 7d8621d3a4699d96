#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taxeval/error.hpp"

namespace taxeval {

// Precomputed vectors keyed by node id or by literal text. Rows are
// L2-normalized at construction, so a dot product is a cosine.
template <typename Scalar>
class BasicEmbeddingTable {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using ConstRow = decltype(std::declval<const Matrix&>().row(0));

  BasicEmbeddingTable() = default;

  BasicEmbeddingTable(std::vector<std::string> keys, Matrix vectors)
      : keys_(std::move(keys)), vectors_(std::move(vectors)) {
    if (static_cast<Eigen::Index>(keys_.size()) != vectors_.rows()) {
      throw InputError("embedding table: key count does not match row count");
    }
    for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
      const Scalar norm = vectors_.row(i).norm();
      if (!(norm > Scalar(0)) || !std::isfinite(static_cast<double>(norm))) {
        throw InputError("embedding for '" + keys_[static_cast<std::size_t>(i)] +
                         "' has zero or non-finite norm");
      }
      vectors_.row(i) /= norm;
      auto [it, inserted] = index_.emplace(keys_[static_cast<std::size_t>(i)], i);
      if (!inserted) throw InputError("duplicate embedding key '" + it->first + "'");
    }
  }

  Eigen::Index dim() const { return vectors_.cols(); }
  std::size_t size() const { return keys_.size(); }
  bool contains(std::string_view key) const { return index_.contains(std::string(key)); }

  std::optional<Eigen::Index> find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  ConstRow row(Eigen::Index i) const { return vectors_.row(i); }

  ConstRow at(std::string_view key) const {
    if (auto i = find(key)) return vectors_.row(*i);
    throw LookupError("no embedding for key '" + std::string(key) + "'");
  }

  const Matrix& matrix() const { return vectors_; }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
  Matrix vectors_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

using EmbeddingTable = BasicEmbeddingTable<double>;

// Cosine of two unit rows, clamped to [-1, 1] and mapped onto [0, 1].
template <typename Scalar>
Scalar cosine_to_unit(Scalar dot) {
  return (std::clamp(dot, Scalar(-1), Scalar(1)) + Scalar(1)) / Scalar(2);
}

template <typename Scalar>
Scalar embed_cosine(const BasicEmbeddingTable<Scalar>& table, std::string_view key_a,
                    std::string_view key_b) {
  return cosine_to_unit<Scalar>(table.at(key_a).dot(table.at(key_b)));
}

// "dim=<d>" header, then "key<TAB>f1 f2 ... fd" per line.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::string& path);

// Externally computed pairwise scores ("key_a<TAB>key_b<TAB>score"), e.g.
// NLI or BERTScore outputs.
class PairwiseScores {
 public:
  void insert(std::string key_a, std::string key_b, double score);
  std::optional<double> find(std::string_view key_a, std::string_view key_b) const;
  // Throws LookupError naming the missing pair.
  double at(std::string_view key_a, std::string_view key_b) const;
  std::size_t size() const { return scores_.size(); }

 private:
  static std::string make_key(std::string_view a, std::string_view b);
  std::unordered_map<std::string, double> scores_;
};

PairwiseScores read_pairwise_scores(std::istream& in);
PairwiseScores load_pairwise_scores(const std::string& path);

}  // namespace taxeval
