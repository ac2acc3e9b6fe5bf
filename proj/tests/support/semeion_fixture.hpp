#pragma once

// A stand-in for the Semeion file: 1593 records in the same text layout,
// record i labelled i % 10 with a sparse pseudo-random 16x16 bitmap.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace tranet::fixture {

inline constexpr int kFixtureRecords = 1593;

inline int fixture_label(int record) { return record % 10; }

inline std::uint8_t fixture_pixel(int record, int p) {
  std::uint64_t h = static_cast<std::uint64_t>(record) * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(p);
  h ^= h >> 31;
  h *= 0xBF58476D1CE4E5B9ULL;
  h ^= h >> 29;
  return (h % 4) == 0;
}

inline std::string semeion_line(int record) {
  std::ostringstream out;
  for (int p = 0; p < 256; ++p) out << (fixture_pixel(record, p) ? "1.0000 " : "0.0000 ");
  for (int d = 0; d < 10; ++d) out << (d == fixture_label(record) ? 1 : 0) << ' ';
  out << "\r\n";
  return out.str();
}

inline std::string semeion_text(int records = kFixtureRecords) {
  std::string text;
  for (int r = 0; r < records; ++r) text += semeion_line(r);
  return text;
}

inline std::filesystem::path write_semeion_fixture(const std::filesystem::path& path) {
  std::ofstream(path, std::ios::binary) << semeion_text();
  return path;
}

}  // namespace tranet::fixture
