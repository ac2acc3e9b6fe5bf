#pragma once

// Cardinal number words for 0..9999 in English and (umlaut-free) German,
// together with strict parsers that accept exactly the generated forms.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/error.hpp"

namespace tranet {

inline constexpr int kMaxNumber = 9999;
inline constexpr std::size_t kMaxVerbalLength = 50;

enum class Language { English, German };

inline bool valid_number(int n) { return n >= 0 && n <= kMaxNumber; }

namespace detail {

inline void require_number(int n) {
  if (!valid_number(n))
    throw EncodingError(EncodingError::Kind::OutOfRange,
                        "number out of range [0, 9999]: " + std::to_string(n));
}

inline constexpr std::array<std::string_view, 20> kEnglishSmall = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};

inline constexpr std::array<std::string_view, 10> kEnglishTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

// Standalone forms; index 1 is "eins".
inline constexpr std::array<std::string_view, 20> kGermanSmall = {
    "null",     "eins",     "zwei",      "drei",     "vier",
    "funf",     "sechs",    "sieben",    "acht",     "neun",
    "zehn",     "elf",      "zwolf",     "dreizehn", "vierzehn",
    "funfzehn", "sechzehn", "siebzehn",  "achtzehn", "neunzehn"};

// Forms used in front of "tausend", "hundert" and "und".
inline constexpr std::array<std::string_view, 10> kGermanPrefix = {
    "", "ein", "zwei", "drei", "vier", "funf", "sechs", "sieben", "acht", "neun"};

inline constexpr std::array<std::string_view, 10> kGermanTens = {
    "", "", "zwanzig", "dreissig", "vierzig", "funfzig", "sechzig", "siebzig", "achtzig", "neunzig"};

inline std::string english_below_100(int n) {
  if (n < 20) return std::string(kEnglishSmall[n]);
  std::string out(kEnglishTens[n / 10]);
  if (n % 10 != 0) {
    out += '-';
    out += kEnglishSmall[n % 10];
  }
  return out;
}

inline std::string german_below_100(int n) {
  if (n < 20) return std::string(kGermanSmall[n]);
  std::string out;
  if (n % 10 != 0) {
    out += kGermanPrefix[n % 10];
    out += "und";
  }
  out += kGermanTens[n / 10];
  return out;
}

}  // namespace detail

/// "<u> thousand <u> hundred and <tens-units>", absent groups omitted.
inline std::string to_english(int n) {
  detail::require_number(n);
  if (n == 0) return "zero";
  const int thousands = n / 1000;
  const int hundreds = (n / 100) % 10;
  const int rest = n % 100;
  std::string out;
  auto append = [&out](std::string_view word) {
    if (!out.empty()) out += ' ';
    out += word;
  };
  if (thousands != 0) {
    append(detail::kEnglishSmall[thousands]);
    append("thousand");
  }
  if (hundreds != 0) {
    append(detail::kEnglishSmall[hundreds]);
    append("hundred");
  }
  if (rest != 0) {
    if (!out.empty()) append("and");
    append(detail::english_below_100(rest));
  }
  return out;
}

/// Thousands and hundreds concatenated, one space before the tens-units word.
inline std::string to_german(int n) {
  detail::require_number(n);
  if (n == 0) return "null";
  const int thousands = n / 1000;
  const int hundreds = (n / 100) % 10;
  const int rest = n % 100;
  std::string out;
  if (thousands != 0) {
    out += detail::kGermanPrefix[thousands];
    out += "tausend";
  }
  if (hundreds != 0) {
    out += detail::kGermanPrefix[hundreds];
    out += "hundert";
  }
  if (rest != 0) {
    if (!out.empty()) out += ' ';
    out += detail::german_below_100(rest);
  }
  return out;
}

inline std::string to_words(int n, Language lang) {
  return lang == Language::English ? to_english(n) : to_german(n);
}

namespace detail {

struct Token {
  std::string_view text;
  std::size_t offset;
};

// Splits on single spaces; empty tokens (leading/trailing/double spaces) are errors.
inline std::vector<Token> split_words(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ' ') {
      if (i == start) throw ParseError("empty word", start);
      tokens.push_back({s.substr(start, i - start), start});
      start = i + 1;
    }
  }
  return tokens;
}

inline std::optional<int> english_unit(std::string_view w) {
  for (int d = 1; d <= 9; ++d)
    if (w == kEnglishSmall[d]) return d;
  return std::nullopt;
}

inline std::optional<int> english_tens_units(std::string_view w) {
  for (int v = 1; v < 20; ++v)
    if (w == kEnglishSmall[v]) return v;
  const auto dash = w.find('-');
  const auto head = w.substr(0, dash);
  for (int t = 2; t <= 9; ++t) {
    if (head != kEnglishTens[t]) continue;
    if (dash == std::string_view::npos) return 10 * t;
    if (auto u = english_unit(w.substr(dash + 1))) return 10 * t + *u;
    return std::nullopt;
  }
  return std::nullopt;
}

class GermanCursor {
 public:
  explicit GermanCursor(std::string_view s) : s_(s) {}

  bool at_end() const { return pos_ == s_.size(); }
  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }

  bool eat(std::string_view lit) {
    if (s_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  // Unit prefix immediately followed by `suffix`.
  std::optional<int> prefixed(std::string_view suffix) {
    const auto save = pos_;
    for (int d = 1; d <= 9; ++d) {
      if (eat(kGermanPrefix[d]) && eat(suffix)) return d;
      pos_ = save;
    }
    return std::nullopt;
  }

  // A tens-units word that must run to the end of input.
  std::optional<int> tens_units_to_end() {
    const auto save = pos_;
    for (int u = 1; u <= 9; ++u) {
      for (int t = 2; t <= 9; ++t) {
        if (eat(kGermanPrefix[u]) && eat("und") && eat(kGermanTens[t]) && at_end())
          return 10 * t + u;
        pos_ = save;
      }
    }
    for (int v = 1; v < 20; ++v) {
      if (eat(kGermanSmall[v]) && at_end()) return v;
      pos_ = save;
    }
    for (int t = 2; t <= 9; ++t) {
      if (eat(kGermanTens[t]) && at_end()) return 10 * t;
      pos_ = save;
    }
    return std::nullopt;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Inverse of to_english. Throws ParseError for anything to_english never produces.
inline int parse_english(std::string_view s) {
  if (s.empty()) throw ParseError("empty input", 0);
  const auto words = detail::split_words(s);
  std::size_t i = 0;
  auto peek = [&](std::size_t k) -> std::string_view {
    return i + k < words.size() ? words[i + k].text : std::string_view{};
  };
  auto here = [&]() { return i < words.size() ? words[i].offset : s.size(); };

  if (words.size() == 1 && words[0].text == "zero") return 0;

  int value = 0;
  bool has_prefix = false;
  if (auto u = detail::english_unit(peek(0)); u && peek(1) == "thousand") {
    value += 1000 * *u;
    i += 2;
    has_prefix = true;
  }
  if (auto u = detail::english_unit(peek(0)); u && peek(1) == "hundred") {
    value += 100 * *u;
    i += 2;
    has_prefix = true;
  }
  if (i == words.size()) {
    if (!has_prefix) throw ParseError("expected a number word", here());
    return value;
  }
  if (has_prefix) {
    if (peek(0) != "and") throw ParseError("expected 'and'", here());
    ++i;
    if (i == words.size()) throw ParseError("expected tens/units after 'and'", here());
  }
  auto tu = detail::english_tens_units(peek(0));
  if (!tu) throw ParseError("unknown number word '" + std::string(peek(0)) + "'", here());
  value += *tu;
  ++i;
  if (i != words.size()) throw ParseError("trailing input", here());
  return value;
}

/// Inverse of to_german.
inline int parse_german(std::string_view s) {
  if (s.empty()) throw ParseError("empty input", 0);
  if (s == "null") return 0;
  detail::GermanCursor cur(s);
  int value = 0;
  bool has_prefix = false;
  if (auto d = cur.prefixed("tausend")) {
    value += 1000 * *d;
    has_prefix = true;
  }
  if (auto d = cur.prefixed("hundert")) {
    value += 100 * *d;
    has_prefix = true;
  }
  if (cur.at_end()) {
    if (!has_prefix) throw ParseError("expected a number word", cur.pos());
    return value;
  }
  if (has_prefix && !cur.eat(" ")) throw ParseError("expected ' ' before tens/units", cur.pos());
  const auto tu_start = cur.pos();
  auto tu = cur.tens_units_to_end();
  if (!tu) throw ParseError("unknown tens/units word", tu_start);
  return value + *tu;
}

inline int parse_words(std::string_view s, Language lang) {
  return lang == Language::English ? parse_english(s) : parse_german(s);
}

}  // namespace tranet
