#pragma once

// Task corpora: English->German number pairs, and 64x16 composites of four
// Semeion handwritten digits labelled with the English number.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/error.hpp"
#include "tranet/io.hpp"
#include "tranet/numword.hpp"
#include "tranet/rng.hpp"

namespace tranet {

struct TranslationPair {
  int n = 0;
  std::string source;  // English
  std::string target;  // German

  bool operator==(const TranslationPair&) const = default;
};

inline TranslationPair make_translation_pair(int n) { return {n, to_english(n), to_german(n)}; }

struct TranslationSplit {
  std::vector<TranslationPair> train;
  std::vector<TranslationPair> test;
};

inline constexpr std::size_t kTranslationTestSize = 100;

/// 100 test numbers drawn without replacement from 0..9999; the other 9900 train.
/// Both lists are in ascending order.
inline TranslationSplit gen_translation_dataset(std::uint64_t seed) {
  std::vector<int> numbers(kMaxNumber + 1);
  std::iota(numbers.begin(), numbers.end(), 0);
  RngStream rng = RngStream(seed).split(0x7472616E73ULL);
  rng.shuffle(std::span<int>(numbers));
  std::vector<int> test(numbers.begin(), numbers.begin() + kTranslationTestSize);
  std::vector<int> train(numbers.begin() + kTranslationTestSize, numbers.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  TranslationSplit split;
  for (int n : train) split.train.push_back(make_translation_pair(n));
  for (int n : test) split.test.push_back(make_translation_pair(n));
  return split;
}

// ---------------------------------------------------------------------------
// Semeion

inline constexpr std::size_t kDigitSide = 16;
inline constexpr std::size_t kDigitPixels = kDigitSide * kDigitSide;
inline constexpr std::size_t kSemeionFields = kDigitPixels + 10;
inline constexpr std::size_t kSemeionRecords = 1593;
inline constexpr std::size_t kSemeionTrainPool = 1493;

struct SemeionRecord {
  std::array<std::uint8_t, kDigitPixels> pixels{};  // row-major 16x16
  int label = 0;
  int source_index = 0;
};

namespace detail {

inline double parse_field(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(DataError::Kind::Format,
                    "line " + std::to_string(line_no) + ": non-numeric field '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

/// Whitespace-separated rows of 256 binary pixels followed by a 10-way one-hot label.
inline std::vector<SemeionRecord> parse_semeion(std::istream& in) {
  std::vector<SemeionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    fields.clear();
    std::string_view rest(line);
    while (true) {
      const auto start = rest.find_first_not_of(" \t\r");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = std::min(rest.find_first_of(" \t\r"), rest.size());
      fields.push_back(rest.substr(0, end));
      rest.remove_prefix(end);
    }
    if (fields.empty()) continue;
    if (fields.size() != kSemeionFields)
      throw DataError(DataError::Kind::BadFieldCount, "line " + std::to_string(line_no) + ": " +
                                                          std::to_string(fields.size()) + " fields, expected 266");
    SemeionRecord rec;
    rec.source_index = static_cast<int>(records.size());
    for (std::size_t p = 0; p < kDigitPixels; ++p) {
      const double v = detail::parse_field(fields[p], line_no);
      if (v != 0.0 && v != 1.0)
        throw DataError(DataError::Kind::NonBinaryPixel,
                        "line " + std::to_string(line_no) + ": pixel " + std::to_string(p) + " is not 0 or 1");
      rec.pixels[p] = static_cast<std::uint8_t>(v);
    }
    int hot = 0;
    for (int d = 0; d < 10; ++d) {
      const double v = detail::parse_field(fields[kDigitPixels + d], line_no);
      if (v != 0.0 && v != 1.0)
        throw DataError(DataError::Kind::BadLabel, "line " + std::to_string(line_no) + ": label field is not 0 or 1");
      if (v == 1.0) {
        ++hot;
        rec.label = d;
      }
    }
    if (hot != 1)
      throw DataError(DataError::Kind::BadLabel,
                      "line " + std::to_string(line_no) + ": label has " + std::to_string(hot) + " hot fields");
    records.push_back(rec);
  }
  return records;
}

/// Parses a full Semeion file; the file must hold exactly 1593 records.
inline std::vector<SemeionRecord> parse_semeion(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw DataError(DataError::Kind::Io, e.what());
  }
  std::istringstream in(text);
  auto records = parse_semeion(in);
  if (records.size() != kSemeionRecords)
    throw DataError(DataError::Kind::BadRecordCount,
                    path.string() + ": " + std::to_string(records.size()) + " records, expected 1593");
  return records;
}

// ---------------------------------------------------------------------------
// Composites

inline constexpr std::size_t kCompositeWidth = 4 * kDigitSide;
inline constexpr std::size_t kCompositePixels = kCompositeWidth * kDigitSide;

struct TranscriptionExample {
  std::vector<std::uint8_t> image;  // 16 rows x 64 columns, row-major
  int n = 0;
  std::string label_text;
  std::array<int, 4> source_indices{};

  std::uint8_t pixel(std::size_t row, std::size_t col) const { return image[row * kCompositeWidth + col]; }
  bool operator==(const TranscriptionExample&) const = default;
};

/// Stacks four digits left to right, most significant first.
inline TranscriptionExample compose_image(const SemeionRecord& d1, const SemeionRecord& d2,
                                          const SemeionRecord& d3, const SemeionRecord& d4) {
  const std::array<const SemeionRecord*, 4> digits = {&d1, &d2, &d3, &d4};
  TranscriptionExample ex;
  ex.image.assign(kCompositePixels, 0);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& rec = *digits[k];
    for (std::size_t r = 0; r < kDigitSide; ++r)
      std::copy_n(rec.pixels.begin() + r * kDigitSide, kDigitSide,
                  ex.image.begin() + r * kCompositeWidth + k * kDigitSide);
    ex.n = ex.n * 10 + rec.label;
    ex.source_indices[k] = rec.source_index;
  }
  ex.label_text = to_english(ex.n);
  return ex;
}

struct TranscriptionSplit {
  std::vector<TranscriptionExample> train;
  std::vector<TranscriptionExample> test;
};

namespace detail {

// Example k draws from its own child stream, so any example can be built independently.
inline std::vector<TranscriptionExample> sample_composites(const std::vector<SemeionRecord>& records,
                                                           std::size_t pool_begin, std::size_t pool_end,
                                                           std::size_t count, const RngStream& stream) {
  std::vector<TranscriptionExample> out;
  out.reserve(count);
  const std::uint64_t pool = pool_end - pool_begin;
  for (std::size_t k = 0; k < count; ++k) {
    RngStream rng = stream.split(k);
    std::array<std::size_t, 4> idx{};
    for (auto& i : idx) i = pool_begin + static_cast<std::size_t>(rng.below(pool));
    out.push_back(compose_image(records[idx[0]], records[idx[1]], records[idx[2]], records[idx[3]]));
  }
  return out;
}

}  // namespace detail

/// Train composites use records [0, 1493), test composites [1493, 1593);
/// each digit image is drawn uniformly with replacement.
inline TranscriptionSplit gen_transcription_dataset(const std::vector<SemeionRecord>& records, std::uint64_t seed,
                                                    std::size_t n_train = 100000, std::size_t n_test = 1000) {
  if (records.size() != kSemeionRecords)
    throw DataError(DataError::Kind::BadRecordCount,
                    "transcription data needs all 1593 Semeion records, got " + std::to_string(records.size()));
  const RngStream root(seed);
  TranscriptionSplit split;
  split.train = detail::sample_composites(records, 0, kSemeionTrainPool, n_train, root.split(0x747261696EULL));
  split.test =
      detail::sample_composites(records, kSemeionTrainPool, kSemeionRecords, n_test, root.split(0x74657374ULL));
  return split;
}

// ---------------------------------------------------------------------------
// On-disk formats
//
// Translation: one "<n>\t<english>\t<german>" line per pair.
// Transcription: <name>_images.bin with 1024 bytes (0/1) per image, plus
// <name>_index.tsv with "<n>\t<label_text>\t<i1>,<i2>,<i3>,<i4>" per image.

inline std::string format_translation_tsv(const std::vector<TranslationPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) out += std::to_string(p.n) + '\t' + p.source + '\t' + p.target + '\n';
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    parts.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return parts;
}

inline int parse_int(std::string_view s, const std::string& where) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(DataError::Kind::Format, where + ": expected an integer, got '" + std::string(s) + "'");
  return v;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    ++line_no;
    if (!line.empty()) f(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace detail

/// Reads pairs back and checks each against the number-word generators.
inline std::vector<TranslationPair> parse_translation_tsv(std::string_view text, const std::string& name = "tsv") {
  std::vector<TranslationPair> pairs;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const std::string where = name + ":" + std::to_string(line_no);
    const auto parts = detail::split_tabs(line);
    if (parts.size() != 3) throw DataError(DataError::Kind::Format, where + ": expected 3 tab-separated fields");
    const int n = detail::parse_int(parts[0], where);
    if (!valid_number(n)) throw DataError(DataError::Kind::Format, where + ": number out of range");
    TranslationPair p{n, std::string(parts[1]), std::string(parts[2])};
    if (p != make_translation_pair(n))
      throw DataError(DataError::Kind::Format, where + ": verbal forms do not match the number");
    pairs.push_back(std::move(p));
  });
  return pairs;
}

inline std::string format_transcription_index(const std::vector<TranscriptionExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += std::to_string(ex.n) + '\t' + ex.label_text + '\t';
    for (std::size_t k = 0; k < 4; ++k) out += (k ? "," : "") + std::to_string(ex.source_indices[k]);
    out += '\n';
  }
  return out;
}

inline std::string format_transcription_images(const std::vector<TranscriptionExample>& examples) {
  std::string out;
  out.reserve(examples.size() * kCompositePixels);
  for (const auto& ex : examples) out.append(ex.image.begin(), ex.image.end());
  return out;
}

inline std::vector<TranscriptionExample> parse_transcription(std::string_view images, std::string_view index,
                                                             const std::string& name = "transcription") {
  std::vector<TranscriptionExample> examples;
  detail::for_each_line(index, [&](std::string_view line, std::size_t line_no) {
    const std::string where = name + "_index:" + std::to_string(line_no);
    const auto parts = detail::split_tabs(line);
    if (parts.size() != 3) throw DataError(DataError::Kind::Format, where + ": expected 3 tab-separated fields");
    TranscriptionExample ex;
    ex.n = detail::parse_int(parts[0], where);
    if (!valid_number(ex.n)) throw DataError(DataError::Kind::Format, where + ": number out of range");
    ex.label_text = std::string(parts[1]);
    if (ex.label_text != to_english(ex.n))
      throw DataError(DataError::Kind::Format, where + ": label text does not match the number");
    std::string_view idx = parts[2];
    for (std::size_t k = 0; k < 4; ++k) {
      const auto comma = idx.find(',');
      if ((k < 3) == (comma == std::string_view::npos))
        throw DataError(DataError::Kind::Format, where + ": expected four comma-separated source indices");
      ex.source_indices[k] = detail::parse_int(idx.substr(0, comma), where);
      idx.remove_prefix(k < 3 ? comma + 1 : idx.size());
    }
    examples.push_back(std::move(ex));
  });
  if (images.size() != examples.size() * kCompositePixels)
    throw DataError(DataError::Kind::Format, name + "_images.bin holds " + std::to_string(images.size()) +
                                                 " bytes, expected " +
                                                 std::to_string(examples.size() * kCompositePixels));
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(images.data()) + e * kCompositePixels;
    examples[e].image.assign(p, p + kCompositePixels);
    if (std::any_of(p, p + kCompositePixels, [](std::uint8_t v) { return v > 1; }))
      throw DataError(DataError::Kind::NonBinaryPixel, name + "_images.bin: image " + std::to_string(e) +
                                                           " has a pixel other than 0 or 1");
  }
  return examples;
}

}  // namespace tranet
