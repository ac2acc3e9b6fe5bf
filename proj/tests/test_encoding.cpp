#include <gtest/gtest.h>

#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "tranet/encoding.hpp"
#include "tranet/rng.hpp"

using namespace tranet;

namespace {

std::set<std::size_t> hot_indices(const std::vector<std::uint8_t>& code) {
  std::set<std::size_t> hot;
  for (std::size_t i = 0; i < code.size(); ++i)
    if (code[i]) hot.insert(i);
  return hot;
}

void expect_one_hot_blocks(const std::vector<std::uint8_t>& code, std::size_t width) {
  for (std::size_t b = 0; b < code.size() / width; ++b) {
    int sum = 0;
    for (std::size_t i = 0; i < width; ++i) sum += code[b * width + i];
    ASSERT_EQ(sum, 1) << "block " << b;
  }
}

}  // namespace

TEST(Alphabet, Layout) {
  EXPECT_EQ(Alphabet::size(), 29u);
  EXPECT_EQ(Alphabet::index_of('a'), 0);
  EXPECT_EQ(Alphabet::index_of('z'), 25);
  EXPECT_EQ(Alphabet::index_of(' '), 26);
  EXPECT_EQ(Alphabet::index_of('-'), 27);
  EXPECT_EQ(Alphabet::index_of('A'), -1);
  std::set<char> symbols;
  for (std::size_t i = 0; i < kPadIndex; ++i) symbols.insert(Alphabet::symbol(i));
  EXPECT_EQ(symbols.size(), 28u);
}

TEST(EncodeText, SingleLetters) {
  const auto a = encode_text("a");
  ASSERT_EQ(a.size(), 1450u);
  EXPECT_EQ(a[0], 1);
  for (std::size_t i = 1; i < 29; ++i) EXPECT_EQ(a[i], 0);
  for (std::size_t slot = 1; slot < 50; ++slot) EXPECT_EQ(a[slot * 29 + kPadIndex], 1) << slot;
  const auto b = encode_text("b");
  EXPECT_EQ(b[0], 0);
  EXPECT_EQ(b[1], 1);
}

TEST(EncodeText, EmptyIsAllPad) {
  const auto code = encode_text("");
  for (std::size_t slot = 0; slot < 50; ++slot) EXPECT_EQ(code[slot * 29 + kPadIndex], 1);
  EXPECT_EQ(std::accumulate(code.begin(), code.end(), 0), 50);
}

TEST(EncodeText, Errors) {
  EXPECT_THROW(encode_text("Twenty"), EncodingError);
  EXPECT_THROW(encode_text("f\xc3\xbc"
                           "nf"),
               EncodingError);
  EXPECT_THROW(encode_text(std::string(51, 'a')), EncodingError);
  EXPECT_NO_THROW(encode_text(std::string(50, 'a')));
  try {
    encode_text(std::string(51, 'a'));
  } catch (const EncodingError& e) {
    EXPECT_EQ(e.kind(), EncodingError::Kind::TooLong);
  }
}

TEST(DecodeText, RoundTripAndTieBreaks) {
  const auto code = encode_text("twenty-five");
  EXPECT_EQ(decode_text<std::uint8_t>(code), "twenty-five");

  std::vector<float> zeros(kLetterCodeSize, 0.0f);
  EXPECT_EQ(decode_text<float>(zeros), std::string(50, 'a'));

  std::vector<float> leading_pad(kLetterCodeSize, 0.0f);
  leading_pad[kPadIndex] = 0.9f;
  leading_pad[29 + 3] = 0.9f;
  EXPECT_EQ(decode_text<float>(leading_pad), "");

  EXPECT_THROW(decode_text<float>(std::vector<float>(1449)), EncodingError);
}

TEST(DecodeText, TotalOnArbitraryVectors) {
  RngStream rng(3);
  std::vector<float> v(kLetterCodeSize);
  for (int trial = 0; trial < 200; ++trial) {
    for (auto& x : v) x = static_cast<float>(rng.uniform(-5, 5));
    const auto s = decode_text<float>(v);
    EXPECT_LE(s.size(), 50u);
    EXPECT_NO_THROW(check_verbal_form(s));
  }
}

TEST(Digits, EncodeExamples) {
  EXPECT_EQ(hot_indices(encode_digits(25)), (std::set<std::size_t>{0, 10, 22, 35}));
  EXPECT_EQ(hot_indices(encode_digits(0)), (std::set<std::size_t>{0, 10, 20, 30}));
  EXPECT_EQ(hot_indices(encode_digits(9999)), (std::set<std::size_t>{9, 19, 29, 39}));
  EXPECT_THROW(encode_digits(10000), EncodingError);
}

TEST(Digits, DecodeExamples) {
  EXPECT_EQ(decode_digits<std::uint8_t>(encode_digits(4225)), 4225);
  EXPECT_EQ(decode_digits<float>(std::vector<float>(40, 0.0f)), 0);
  std::vector<float> v(40, 0.1f);
  v[7] = v[10 + 6] = v[20 + 6] = v[30 + 0] = 0.8f;
  EXPECT_EQ(decode_digits<float>(v), 7660);
  EXPECT_THROW(decode_digits<float>(std::vector<float>(41)), EncodingError);
}

TEST(Codecs, ExhaustiveRoundTrips) {
  for (int n = 0; n <= kMaxNumber; ++n) {
    const auto digits = encode_digits(n);
    expect_one_hot_blocks(digits, 10);
    ASSERT_EQ(decode_digits<std::uint8_t>(digits), n);
    for (const auto& s : {to_english(n), to_german(n)}) {
      const auto code = encode_text(s);
      expect_one_hot_blocks(code, 29);
      ASSERT_EQ(decode_text<std::uint8_t>(code), s);
    }
  }
}
