#include "taxeval/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <stdexcept>

namespace taxeval {
namespace {

enum class CharClass { keep, space, drop };

CharClass classify(UChar32 c) {
  if (u_isUWhiteSpace(c) || u_iscntrl(c)) return CharClass::space;
  switch (u_charType(c)) {
    case U_DASH_PUNCTUATION:
      return CharClass::space;
    case U_CONNECTOR_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return CharClass::drop;
    default:
      return CharClass::keep;
  }
}

bool is_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

// ASCII is closed under NFKC and case folding, so this agrees with the
// general path below.
std::string clean_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      out.push_back(static_cast<char>(c));
    } else if (c == '-' || c < 0x20 || c == 0x7f || c == ' ') {
      out.push_back(' ');
    }
    // everything else printable is punctuation or a symbol
  }
  return out;
}

const icu::Normalizer2& nfkc_casefold() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU NFKC_Casefold normalizer unavailable");
  }
  return *n;
}

icu::UnicodeString fold(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfkc_casefold().normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  return out;
}

icu::UnicodeString strip(const icu::UnicodeString& s) {
  icu::UnicodeString out;
  for (int32_t i = 0; i < s.length();) {
    UChar32 c = s.char32At(i);
    switch (classify(c)) {
      case CharClass::keep: out.append(c); break;
      case CharClass::space: out.append(static_cast<UChar32>(' ')); break;
      case CharClass::drop: break;
    }
    i = s.moveIndex32(i, 1);
  }
  return out;
}

std::string clean_unicode(std::string_view text) {
  // Invalid UTF-8 decodes to U+FFFD, a symbol, and is dropped by strip().
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  // Stripping can bring combining marks next to letters, and folding can
  // produce new punctuation (e.g. fractions); iterate to a fixed point.
  for (int round = 0; round < 4; ++round) {
    icu::UnicodeString next = strip(fold(s));
    if (next == s) break;
    s = std::move(next);
  }
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

NormalizedText normalize(std::string_view text, bool stem) {
  const std::string cleaned = is_ascii(text) ? clean_ascii(text) : clean_unicode(text);
  NormalizedText out;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    std::size_t j = i;
    while (j < cleaned.size() && cleaned[j] != ' ') ++j;
    if (j > i) {
      std::string_view tok(cleaned.data() + i, j - i);
      out.tokens.push_back(stem ? porter_stem(tok) : std::string(tok));
    }
    i = j;
  }
  for (const auto& t : out.tokens) {
    if (!out.joined.empty()) out.joined.push_back(' ');
    out.joined += t;
  }
  return out;
}

bool is_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto len = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  std::vector<std::string> out;
  if (n == 0 || tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string g = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      g.push_back(' ');
      g += tokens[i + k];
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace taxeval
