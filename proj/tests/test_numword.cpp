#include <gtest/gtest.h>

#include <set>
#include <string>

#include "tranet/encoding.hpp"
#include "tranet/numword.hpp"

using namespace tranet;

namespace {

struct Reference {
  int n;
  const char* english;
  const char* german;
};

// Written out by hand before the generators existed.
const Reference kReference[] = {
    {0, "zero", "null"},
    {1, "one", "eins"},
    {11, "eleven", "elf"},
    {16, "sixteen", "sechzehn"},
    {21, "twenty-one", "einundzwanzig"},
    {25, "twenty-five", "funfundzwanzig"},
    {30, "thirty", "dreissig"},
    {100, "one hundred", "einhundert"},
    {101, "one hundred and one", "einhundert eins"},
    {110, "one hundred and ten", "einhundert zehn"},
    {111, "one hundred and eleven", "einhundert elf"},
    {191, "one hundred and ninety-one", "einhundert einundneunzig"},
    {766, "seven hundred and sixty-six", "siebenhundert sechsundsechzig"},
    {1000, "one thousand", "eintausend"},
    {1001, "one thousand and one", "eintausend eins"},
    {2019, "two thousand and nineteen", "zweitausend neunzehn"},
    {3507, "three thousand five hundred and seven", "dreitausendfunfhundert sieben"},
    {4225, "four thousand two hundred and twenty-five", "viertausendzweihundert funfundzwanzig"},
    {7340, "seven thousand three hundred and forty", "siebentausenddreihundert vierzig"},
    {8860, "eight thousand eight hundred and sixty", "achttausendachthundert sechzig"},
    {9999, "nine thousand nine hundred and ninety-nine", "neuntausendneunhundert neunundneunzig"},
};

}  // namespace

TEST(Numword, MatchesReferenceTable) {
  for (const auto& r : kReference) {
    EXPECT_EQ(to_english(r.n), r.english) << r.n;
    EXPECT_EQ(to_german(r.n), r.german) << r.n;
    EXPECT_EQ(parse_english(r.english), r.n);
    EXPECT_EQ(parse_german(r.german), r.n);
  }
}

TEST(Numword, PaperSurfaceForms) {
  EXPECT_EQ(to_english(25), "twenty-five");
  EXPECT_EQ(to_german(25), "funfundzwanzig");
  EXPECT_EQ(to_german(191), "einhundert einundneunzig");
  EXPECT_EQ(to_german(766), "siebenhundert sechsundsechzig");
  EXPECT_EQ(to_german(4225), "viertausendzweihundert funfundzwanzig");
  EXPECT_EQ(to_english(8860), "eight thousand eight hundred and sixty");
}

TEST(Numword, ExhaustiveRoundTripAndAlphabet) {
  std::set<std::string> english, german;
  for (int n = 0; n <= kMaxNumber; ++n) {
    const auto e = to_english(n);
    const auto g = to_german(n);
    ASSERT_EQ(parse_english(e), n) << e;
    ASSERT_EQ(parse_german(g), n) << g;
    ASSERT_NO_THROW(check_verbal_form(e)) << e;
    ASSERT_NO_THROW(check_verbal_form(g)) << g;
    english.insert(e);
    german.insert(g);
  }
  EXPECT_EQ(english.size(), 10000u);
  EXPECT_EQ(german.size(), 10000u);
}

TEST(Numword, OutOfRangeNumbersThrow) {
  EXPECT_THROW(to_english(10000), EncodingError);
  EXPECT_THROW(to_german(-1), EncodingError);
}

TEST(Numword, EnglishParserRejectsNonCanonicalForms) {
  const char* bad[] = {"twenty five five",
                       "",
                       "one hundred ninety-one",
                       "one hundred and",
                       "and five",
                       "zero zero",
                       "one thousand zero",
                       "twenty-",
                       "twenty-ten",
                       "ten-one",
                       " one",
                       "one  hundred",
                       "one hundred and twenty five",
                       "hundred",
                       "one hundred one thousand",
                       "eleven hundred"};
  for (const char* s : bad) EXPECT_THROW(parse_english(s), ParseError) << '"' << s << '"';
}

TEST(Numword, ParseErrorCarriesOffset) {
  try {
    parse_english("twenty five five");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
  try {
    parse_english("");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(Numword, GermanParserRejectsNonCanonicalForms) {
  const char* bad[] = {"",
                       "einhunderteinundneunzig",
                       "einhundert  eins",
                       "ein",
                       "einstausend",
                       "zweiundzehn",
                       "einundneenzig",
                       "null null",
                       "eintausend null",
                       "hundert",
                       "einhundert ein",
                       " eins",
                       "funfzehnhundert"};
  for (const char* s : bad) EXPECT_THROW(parse_german(s), ParseError) << '"' << s << '"';
}

TEST(Numword, ParsersAreLanguageSpecific) {
  EXPECT_THROW(parse_english("funfundzwanzig"), ParseError);
  EXPECT_THROW(parse_german("twenty-five"), ParseError);
  EXPECT_EQ(parse_words("twenty-five", Language::English), 25);
  EXPECT_EQ(parse_words("funfundzwanzig", Language::German), 25);
}
