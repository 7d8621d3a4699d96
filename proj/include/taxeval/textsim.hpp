#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "taxeval/error.hpp"
#include "taxeval/text.hpp"

// Surface and n-gram similarity between a reference (a taxonomy label) and
// a prediction. The templates work on any equality-comparable token type so
// the same code scores std::string tokens and interned integer ids.

namespace taxeval {

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

namespace detail {

// Which positions of a short sequence are already consumed.
class UsedMask {
 public:
  explicit UsedMask(std::size_t n) : heap_(n > inline_.size() ? n : 0, false) {}
  bool test(std::size_t i) const { return heap_.empty() ? inline_[i] : bool(heap_[i]); }
  void set(std::size_t i) {
    if (heap_.empty()) {
      inline_[i] = true;
    } else {
      heap_[i] = true;
    }
  }

 private:
  std::array<bool, 64> inline_{};
  std::vector<bool> heap_;
};

// Size of the multiset intersection of the length-n windows of a and b.
template <typename Token>
std::size_t clipped_ngram_matches(std::span<const Token> a, std::span<const Token> b, std::size_t n) {
  if (a.size() < n || b.size() < n) return 0;
  const std::size_t na = a.size() - n + 1;
  const std::size_t nb = b.size() - n + 1;
  UsedMask used(nb);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (used.test(j)) continue;
      if (std::equal(a.begin() + i, a.begin() + i + n, b.begin() + j)) {
        used.set(j);
        ++matches;
        break;
      }
    }
  }
  return matches;
}

}  // namespace detail

// 1 iff both token sequences are equal and non-empty.
template <typename Token>
double exact_match(std::span<const Token> a, std::span<const Token> b) {
  if (a.empty() || b.empty()) return 0.0;
  return std::ranges::equal(a, b) ? 1.0 : 0.0;
}

// 1 iff the label occurs as a contiguous run of whole tokens inside the
// prediction. An empty label never matches.
template <typename Token>
double contained(std::span<const Token> label, std::span<const Token> prediction) {
  if (label.empty() || label.size() > prediction.size()) return 0.0;
  auto hit = std::search(prediction.begin(), prediction.end(), label.begin(), label.end());
  return hit != prediction.end() ? 1.0 : 0.0;
}

// Clipped unigram recall against the reference.
template <typename Token>
double rouge1(std::span<const Token> reference, std::span<const Token> prediction) {
  if (reference.empty()) throw UndefinedMeasure("ROUGE1 is undefined for an empty reference");
  return static_cast<double>(detail::clipped_ngram_matches(reference, prediction, 1)) /
         static_cast<double>(reference.size());
}

// Sentence BLEU over unigrams and bigrams with add-one smoothing of every
// order: p_n = (matches_n + 1) / (prediction_ngrams_n + 1), geometric mean of
// p_1 and p_2, times the brevity penalty. Empty inputs score 0.
template <typename Token>
double bleu2(std::span<const Token> reference, std::span<const Token> prediction) {
  if (reference.empty() || prediction.empty()) return 0.0;
  const double c = static_cast<double>(prediction.size());
  const double r = static_cast<double>(reference.size());
  double log_p = 0.0;
  for (std::size_t n = 1; n <= 2; ++n) {
    const double total = prediction.size() >= n ? c - static_cast<double>(n) + 1.0 : 0.0;
    const double matches = static_cast<double>(detail::clipped_ngram_matches(reference, prediction, n));
    log_p += std::log((matches + 1.0) / (total + 1.0));
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_p / 2.0);
}

// METEOR with exact and stem matching stages only. Unigrams are aligned
// greedily left to right; `*_stems` are parallel to the surface tokens.
template <typename Token>
double meteor_like(std::span<const Token> reference, std::span<const Token> reference_stems,
                   std::span<const Token> prediction, std::span<const Token> prediction_stems,
                   const MeteorParams& params = {}) {
  if (reference.empty() || prediction.empty()) return 0.0;
  constexpr std::size_t unaligned = static_cast<std::size_t>(-1);
  std::vector<std::size_t> align(prediction.size(), unaligned);
  detail::UsedMask used(reference.size());
  std::size_t matches = 0;
  auto stage = [&](std::span<const Token> pred, std::span<const Token> ref) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (align[i] != unaligned) continue;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used.test(j) && pred[i] == ref[j]) {
          used.set(j);
          align[i] = j;
          ++matches;
          break;
        }
      }
    }
  };
  stage(prediction, reference);
  stage(prediction_stems, reference_stems);
  if (matches == 0) return 0.0;

  std::size_t chunks = 0;
  std::size_t prev_i = unaligned;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    if (align[i] == unaligned) continue;
    const bool continues = prev_i != unaligned && prev_i + 1 == i && align[prev_i] + 1 == align[i];
    if (!continues) ++chunks;
    prev_i = i;
  }

  const double m = static_cast<double>(matches);
  const double precision = m / static_cast<double>(prediction.size());
  const double recall = m / static_cast<double>(reference.size());
  const double fmean =
      precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty = params.gamma * std::pow(static_cast<double>(chunks) / m, params.beta);
  return fmean * (1.0 - penalty);
}

// NormalizedText conveniences. Stemming is whatever normalize() applied;
// meteor_like expects unstemmed text and stems internally.
double exact_match(const NormalizedText& a, const NormalizedText& b);
double contained(const NormalizedText& label, const NormalizedText& prediction);
double rouge1(const NormalizedText& reference, const NormalizedText& prediction);
double bleu2(const NormalizedText& reference, const NormalizedText& prediction);
double meteor_like(const NormalizedText& reference, const NormalizedText& prediction,
                   const MeteorParams& params = {});

}  // namespace taxeval
