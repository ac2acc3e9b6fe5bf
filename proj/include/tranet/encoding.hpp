#pragma once

// One-hot codecs: 50 letter slots x 29 symbols for strings, 4 digit slots x 10
// for numbers. Decoders take real-valued network outputs (argmax per block,
// lowest index wins ties).

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/error.hpp"
#include "tranet/numword.hpp"

namespace tranet {

inline constexpr std::size_t kAlphabetSize = 29;
inline constexpr std::size_t kTextSlots = kMaxVerbalLength;
inline constexpr std::size_t kLetterCodeSize = kTextSlots * kAlphabetSize;  // 1450
inline constexpr std::size_t kDigitSlots = 4;
inline constexpr std::size_t kDigitCodeSize = kDigitSlots * 10;  // 40
inline constexpr std::size_t kPadIndex = 28;

/// a..z, space, hyphen, then the pad symbol (index 28, never a real character).
struct Alphabet {
  static constexpr std::size_t size() { return kAlphabetSize; }

  static constexpr int index_of(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a';
    if (c == ' ') return 26;
    if (c == '-') return 27;
    return -1;
  }

  /// Character for a non-pad index.
  static constexpr char symbol(std::size_t i) {
    return i < 26 ? static_cast<char>('a' + i) : (i == 26 ? ' ' : '-');
  }
};

/// Validates a verbal form against the task alphabet and the 50-slot limit.
inline void check_verbal_form(std::string_view s) {
  if (s.size() > kTextSlots)
    throw EncodingError(EncodingError::Kind::TooLong,
                        "text longer than 50 characters: '" + std::string(s) + "'");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (Alphabet::index_of(s[i]) < 0)
      throw EncodingError(EncodingError::Kind::InvalidCharacter,
                          "character outside the task alphabet at position " + std::to_string(i));
}

/// Writes the letter code of `s` into `out` (size 1450).
template <typename T>
void encode_text_into(std::string_view s, std::span<T> out) {
  check_verbal_form(s);
  if (out.size() != kLetterCodeSize)
    throw EncodingError(EncodingError::Kind::WrongLength, "letter code buffer must hold 1450 values");
  std::fill(out.begin(), out.end(), T(0));
  for (std::size_t slot = 0; slot < kTextSlots; ++slot) {
    const std::size_t sym = slot < s.size() ? static_cast<std::size_t>(Alphabet::index_of(s[slot]))
                                            : kPadIndex;
    out[slot * kAlphabetSize + sym] = T(1);
  }
}

inline std::vector<std::uint8_t> encode_text(std::string_view s) {
  std::vector<std::uint8_t> code(kLetterCodeSize);
  encode_text_into<std::uint8_t>(s, code);
  return code;
}

namespace detail {

template <typename T>
std::size_t argmax_block(std::span<const T> block) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < block.size(); ++i)
    if (block[i] > block[best]) best = i;
  return best;
}

}  // namespace detail

/// Per-slot argmax symbols, before truncation at the first pad.
template <typename T>
std::array<std::uint8_t, kTextSlots> decode_slots(std::span<const T> v) {
  if (v.size() != kLetterCodeSize)
    throw EncodingError(EncodingError::Kind::WrongLength,
                        "letter code must have 1450 values, got " + std::to_string(v.size()));
  std::array<std::uint8_t, kTextSlots> slots{};
  for (std::size_t slot = 0; slot < kTextSlots; ++slot)
    slots[slot] = static_cast<std::uint8_t>(
        detail::argmax_block(v.subspan(slot * kAlphabetSize, kAlphabetSize)));
  return slots;
}

template <typename T>
std::string decode_text(std::span<const T> v) {
  const auto slots = decode_slots(v);
  std::string out;
  for (auto sym : slots) {
    if (sym == kPadIndex) break;
    out += Alphabet::symbol(sym);
  }
  return out;
}

template <typename T>
void encode_digits_into(int n, std::span<T> out) {
  detail::require_number(n);
  if (out.size() != kDigitCodeSize)
    throw EncodingError(EncodingError::Kind::WrongLength, "digit code buffer must hold 40 values");
  std::fill(out.begin(), out.end(), T(0));
  int div = 1000;
  for (std::size_t k = 0; k < kDigitSlots; ++k, div /= 10)
    out[k * 10 + static_cast<std::size_t>((n / div) % 10)] = T(1);
}

inline std::vector<std::uint8_t> encode_digits(int n) {
  std::vector<std::uint8_t> code(kDigitCodeSize);
  encode_digits_into<std::uint8_t>(n, code);
  return code;
}

/// Argmax digit of each of the four blocks, most significant first.
template <typename T>
std::array<int, kDigitSlots> decode_digit_blocks(std::span<const T> v) {
  if (v.size() != kDigitCodeSize)
    throw EncodingError(EncodingError::Kind::WrongLength,
                        "digit code must have 40 values, got " + std::to_string(v.size()));
  std::array<int, kDigitSlots> digits{};
  for (std::size_t k = 0; k < kDigitSlots; ++k)
    digits[k] = static_cast<int>(detail::argmax_block(v.subspan(k * 10, 10)));
  return digits;
}

template <typename T>
int decode_digits(std::span<const T> v) {
  int n = 0;
  for (int d : decode_digit_blocks(v)) n = n * 10 + d;
  return n;
}

}  // namespace tranet
