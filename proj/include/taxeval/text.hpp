#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace taxeval {

// Lowercase word tokens plus their single-space join. Only normalize()
// produces one.
struct NormalizedText {
  std::vector<std::string> tokens;
  std::string joined;

  bool empty() const { return tokens.empty(); }
  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
};

// NFKC + case folding, dashes to spaces, remaining punctuation and symbols
// dropped, whitespace collapsed. With `stem`, each token is Porter-stemmed.
// Malformed UTF-8 sequences are treated as punctuation.
NormalizedText normalize(std::string_view text, bool stem = false);

// Porter stemmer, reference C implementation variant. Words of one or two
// letters and words containing anything other than a-z are returned
// unchanged.
std::string porter_stem(std::string_view word);

bool is_valid_utf8(std::string_view text);

// Word n-grams joined by single spaces; empty when there are fewer than n
// tokens.
std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens, std::size_t n);

}  // namespace taxeval
