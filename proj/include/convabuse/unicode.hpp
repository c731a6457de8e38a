#pragma once

#include <string>
#include <string_view>

namespace convabuse::unicode {

/// Coarse Unicode general-category buckets used by the content features.
/// kUpper is the Lu category; every other letter is kLetter.
enum class CharClass : unsigned char {
  kOther = 0,
  kUpper = 1,
  kLetter = 2,
  kDigit = 3,
  kPunct = 4,
  kSpace = 5,
  kSymbol = 6,
};

/// Decodes UTF-8. Invalid sequences decode to U+FFFD, one per bad byte.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view text);

CharClass classify(char32_t cp);
char32_t to_lower(char32_t cp);

inline bool is_space(char32_t cp) { return classify(cp) == CharClass::kSpace; }
inline bool is_punct(char32_t cp) { return classify(cp) == CharClass::kPunct; }
inline bool is_letter(char32_t cp) {
  const CharClass c = classify(cp);
  return c == CharClass::kUpper || c == CharClass::kLetter;
}

}  // namespace convabuse::unicode
