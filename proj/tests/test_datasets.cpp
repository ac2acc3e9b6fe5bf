#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "support/semeion_fixture.hpp"
#include "tranet/datasets.hpp"
#include "tranet/harness.hpp"

using namespace tranet;

namespace {

std::vector<SemeionRecord> fixture_records() {
  std::istringstream in(fixture::semeion_text());
  return parse_semeion(in);
}

SemeionRecord digit(int label, std::uint8_t fill = 0) {
  SemeionRecord r;
  r.label = label;
  r.pixels.fill(fill);
  return r;
}

DataError::Kind parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_semeion(in);
  } catch (const DataError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "input was accepted";
  return DataError::Kind::Io;
}

}  // namespace

TEST(TranslationData, SplitShape) {
  const auto split = gen_translation_dataset(1);
  ASSERT_EQ(split.train.size(), 9900u);
  ASSERT_EQ(split.test.size(), 100u);
  std::set<int> all;
  for (const auto& p : split.train) all.insert(p.n);
  for (const auto& p : split.test) all.insert(p.n);
  EXPECT_EQ(all.size(), 10000u);
  EXPECT_TRUE(std::is_sorted(split.test.begin(), split.test.end(), [](auto& a, auto& b) { return a.n < b.n; }));
  EXPECT_EQ(split.test[0], make_translation_pair(split.test[0].n));
  EXPECT_TRUE(translation_split_ok(split));
}

TEST(TranslationData, SeedDeterminesSplit) {
  const auto a = gen_translation_dataset(1), b = gen_translation_dataset(1), c = gen_translation_dataset(2);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train, b.train);
  EXPECT_NE(a.test, c.test);
}

TEST(TranslationData, TsvRoundTrip) {
  const auto split = gen_translation_dataset(4);
  const auto text = format_translation_tsv(split.test);
  EXPECT_EQ(parse_translation_tsv(text), split.test);
  EXPECT_THROW(parse_translation_tsv("25\ttwenty-five\tfunfundzwanzig\textra\n"), DataError);
  EXPECT_THROW(parse_translation_tsv("25\ttwenty-six\tfunfundzwanzig\n"), DataError);
  EXPECT_THROW(parse_translation_tsv("x\ttwenty-five\tfunfundzwanzig\n"), DataError);
}

TEST(Semeion, ParsesFixture) {
  const auto records = fixture_records();
  ASSERT_EQ(records.size(), 1593u);
  for (int i : {0, 1, 17, 1592}) {
    EXPECT_EQ(records[i].label, fixture::fixture_label(i));
    EXPECT_EQ(records[i].source_index, i);
    for (int p = 0; p < 256; ++p) ASSERT_EQ(records[i].pixels[p], fixture::fixture_pixel(i, p));
  }
}

TEST(Semeion, RejectsMalformedRecords) {
  using K = DataError::Kind;
  std::string line = fixture::semeion_line(3);

  std::string extra = line;
  extra.insert(0, "0 ");
  EXPECT_EQ(parse_error(extra), K::BadFieldCount);

  std::string two_hot = line;
  const auto label_start = two_hot.rfind("0 0 0 1");
  two_hot[label_start] = '1';
  EXPECT_EQ(parse_error(two_hot), K::BadLabel);

  std::string grey = line;
  grey.replace(0, 6, "0.5000");
  EXPECT_EQ(parse_error(grey), K::NonBinaryPixel);

  std::string junk = line;
  junk.replace(0, 6, "abcdef");
  EXPECT_EQ(parse_error(junk), K::Format);
}

TEST(Semeion, FileMustHoldAllRecords) {
  const auto dir = std::filesystem::temp_directory_path() / "tranet_test_datasets";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "short.data") << fixture::semeion_text(10);
  try {
    parse_semeion(dir / "short.data");
    ADD_FAILURE();
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataError::Kind::BadRecordCount);
  }
  EXPECT_EQ(parse_semeion(fixture::write_semeion_fixture(dir / "full.data")).size(), 1593u);
  EXPECT_THROW(parse_semeion(dir / "missing.data"), DataError);
  std::filesystem::remove_all(dir);
}

TEST(Composite, LayoutAndLabel) {
  SemeionRecord d[4] = {digit(2), digit(0), digit(1), digit(9)};
  for (int k = 0; k < 4; ++k) {
    d[k].source_index = 100 + k;
    for (int r = 0; r < 16; ++r) d[k].pixels[r * 16 + k] = 1;  // column k of digit k
  }
  const auto ex = compose_image(d[0], d[1], d[2], d[3]);
  EXPECT_EQ(ex.n, 2019);
  EXPECT_EQ(ex.label_text, "two thousand and nineteen");
  EXPECT_EQ(ex.source_indices, (std::array<int, 4>{100, 101, 102, 103}));
  ASSERT_EQ(ex.image.size(), 1024u);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 64; ++c) ASSERT_EQ(ex.pixel(r, c), c % 16 == c / 16) << r << "," << c;
}

TEST(Composite, LeadingZerosAndBlankDigits) {
  const auto ex = compose_image(digit(0), digit(0), digit(4), digit(2));
  EXPECT_EQ(ex.n, 42);
  EXPECT_EQ(ex.label_text, "forty-two");
  EXPECT_TRUE(std::all_of(ex.image.begin(), ex.image.end(), [](auto v) { return v == 0; }));
  const auto full = compose_image(digit(9, 1), digit(9, 1), digit(9, 1), digit(9, 1));
  EXPECT_TRUE(std::all_of(full.image.begin(), full.image.end(), [](auto v) { return v == 1; }));
}

TEST(TranscriptionData, PoolsSizesAndDeterminism) {
  const auto records = fixture_records();
  const auto split = gen_transcription_dataset(records, 1, 2000, 300);
  ASSERT_EQ(split.train.size(), 2000u);
  ASSERT_EQ(split.test.size(), 300u);
  for (const auto& ex : split.train)
    for (int i : ex.source_indices) ASSERT_LT(i, 1493);
  for (const auto& ex : split.test)
    for (int i : ex.source_indices) ASSERT_GE(i, 1493);
  for (const auto& ex : split.test) {
    int n = 0;
    for (int i : ex.source_indices) n = n * 10 + fixture::fixture_label(i);
    ASSERT_EQ(ex.n, n);
  }
  EXPECT_TRUE(transcription_split_ok(split));

  const auto again = gen_transcription_dataset(records, 1, 2000, 300);
  EXPECT_EQ(again.train, split.train);
  EXPECT_EQ(again.test, split.test);
  EXPECT_NE(gen_transcription_dataset(records, 2, 10, 10).test, gen_transcription_dataset(records, 1, 10, 10).test);

  // Example k does not depend on how many examples are requested.
  const auto prefix = gen_transcription_dataset(records, 1, 50, 5);
  EXPECT_TRUE(std::equal(prefix.train.begin(), prefix.train.end(), split.train.begin()));
}

TEST(TranscriptionData, NeedsFullRecordSet) {
  auto records = fixture_records();
  records.pop_back();
  EXPECT_THROW(gen_transcription_dataset(records, 1, 10, 10), DataError);
}

TEST(TranscriptionData, SerialisationRoundTrip) {
  const auto split = gen_transcription_dataset(fixture_records(), 3, 20, 7);
  const auto images = format_transcription_images(split.test);
  const auto index = format_transcription_index(split.test);
  EXPECT_EQ(images.size(), 7u * 1024u);
  EXPECT_EQ(parse_transcription(images, index), split.test);
  EXPECT_THROW(parse_transcription(images.substr(1), index), DataError);
  EXPECT_THROW(parse_transcription(images, "12\ttwelve\t1,2,3\n"), DataError);
  EXPECT_THROW(parse_transcription(images, "12\tthirteen\t1,2,3,4\n"), DataError);
}

TEST(TrainingSets, EncodingsLineUp) {
  const auto split = gen_translation_dataset(1);
  const auto e2e = end_to_end_set(split);
  const auto enc = encoder_set(split);
  const auto dec = decoder_set(split);
  EXPECT_EQ(e2e.rows(), 9900u);
  EXPECT_EQ(enc.rows(), 9900u);
  EXPECT_EQ(dec.rows(), 9900u);
  EXPECT_EQ(e2e.in_dim, 1450u);
  EXPECT_EQ(enc.out_dim, 40u);
  EXPECT_EQ(dec.in_dim, 40u);
  const auto& p = split.train[123];
  const auto x = e2e.input(123);
  const auto english = encode_text(p.source);
  EXPECT_TRUE(std::equal(x.begin(), x.end(), english.begin()));
  const auto code = encode_digits(p.n);
  EXPECT_TRUE(std::equal(enc.target(123).begin(), enc.target(123).end(), code.begin()));
  EXPECT_TRUE(std::equal(dec.input(123).begin(), dec.input(123).end(), code.begin()));
  const auto german = encode_text(p.target);
  EXPECT_TRUE(std::equal(dec.target(123).begin(), dec.target(123).end(), german.begin()));

  const auto test = eval_set(split);
  EXPECT_EQ(test.targets.size(), 100u);
  EXPECT_EQ(test.targets[0], split.test[0].target);
}
