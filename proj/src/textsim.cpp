#include "taxeval/textsim.hpp"

#include <string>

namespace taxeval {
namespace {

using Tokens = std::span<const std::string>;

std::vector<std::string> stems_of(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(porter_stem(t));
  return out;
}

}  // namespace

double exact_match(const NormalizedText& a, const NormalizedText& b) {
  return exact_match(Tokens(a.tokens), Tokens(b.tokens));
}

double contained(const NormalizedText& label, const NormalizedText& prediction) {
  return contained(Tokens(label.tokens), Tokens(prediction.tokens));
}

double rouge1(const NormalizedText& reference, const NormalizedText& prediction) {
  return rouge1(Tokens(reference.tokens), Tokens(prediction.tokens));
}

double bleu2(const NormalizedText& reference, const NormalizedText& prediction) {
  return bleu2(Tokens(reference.tokens), Tokens(prediction.tokens));
}

double meteor_like(const NormalizedText& reference, const NormalizedText& prediction,
                   const MeteorParams& params) {
  const auto ref_stems = stems_of(reference.tokens);
  const auto pred_stems = stems_of(prediction.tokens);
  return meteor_like(Tokens(reference.tokens), Tokens(ref_stems), Tokens(prediction.tokens),
                     Tokens(pred_stems), params);
}

}  // namespace taxeval
