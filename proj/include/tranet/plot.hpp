#pragma once

// Minimal SVG loss curves and PGM image dumps.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/harness.hpp"

namespace tranet {

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

/// One polyline per training phase; with several repeats each point is the
/// mean loss of that epoch across repeats.
inline std::string loss_curves_svg(const ExperimentReport& report) {
  constexpr double W = 640, H = 400, left = 70, right = 140, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;

  std::map<Phase, std::map<int, std::pair<double, int>>> sums;
  for (const auto& rep : report.repeats)
    for (const auto& e : rep.history) {
      auto& s = sums[e.phase][e.epoch];
      s.first += e.loss;
      s.second += 1;
    }

  int max_epoch = 1;
  double max_loss = 0.0;
  for (const auto& [phase, by_epoch] : sums)
    for (const auto& [epoch, s] : by_epoch) {
      max_epoch = std::max(max_epoch, epoch);
      max_loss = std::max(max_loss, s.first / s.second);
    }
  if (max_loss <= 0.0) max_loss = 1.0;

  auto x_of = [&](int epoch) { return left + pw * (max_epoch > 1 ? (epoch - 1.0) / (max_epoch - 1.0) : 0.5); };
  auto y_of = [&](double loss) { return top + ph * (1.0 - loss / max_loss); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         std::string(to_string(report.task)) + " / " + std::string(to_string(report.mode)) + " training loss</text>\n";
  svg += "<line x1=\"" + detail::fmt_num(left) + "\" y1=\"" + detail::fmt_num(top + ph) + "\" x2=\"" +
         detail::fmt_num(left + pw) + "\" y2=\"" + detail::fmt_num(top + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::fmt_num(left) + "\" y1=\"" + detail::fmt_num(top) + "\" x2=\"" +
         detail::fmt_num(left) + "\" y2=\"" + detail::fmt_num(top + ph) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double loss = max_loss * i / 4.0;
    svg += "<text x=\"" + detail::fmt_num(left - 6) + "\" y=\"" + detail::fmt_num(y_of(loss) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + detail::fmt_tick(loss) +
           "</text>\n";
  }
  svg += "<text x=\"" + detail::fmt_num(left) + "\" y=\"" + detail::fmt_num(top + ph + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">1</text>\n";
  svg += "<text x=\"" + detail::fmt_num(left + pw) + "\" y=\"" + detail::fmt_num(top + ph + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + std::to_string(max_epoch) +
         "</text>\n";
  svg += "<text x=\"" + detail::fmt_num(left + pw / 2) + "\" y=\"" + detail::fmt_num(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">epoch</text>\n";
  svg += "<text x=\"16\" y=\"" + detail::fmt_num(top + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         detail::fmt_num(top + ph / 2) + ")\">mean BCE</text>\n";

  static const std::map<Phase, const char*> colors = {
      {Phase::End2End, "#d62728"}, {Phase::Encoder, "#1f77b4"}, {Phase::Decoder, "#2ca02c"}};
  int legend = 0;
  for (const auto& [phase, by_epoch] : sums) {
    std::string points;
    for (const auto& [epoch, s] : by_epoch) {
      if (!points.empty()) points += ' ';
      points += detail::fmt_num(x_of(epoch)) + "," + detail::fmt_num(y_of(s.first / s.second));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colors.at(phase)) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
    const double ly = top + 10 + 18 * legend++;
    svg += "<line x1=\"" + detail::fmt_num(left + pw + 12) + "\" y1=\"" + detail::fmt_num(ly) + "\" x2=\"" +
           detail::fmt_num(left + pw + 32) + "\" y2=\"" + detail::fmt_num(ly) + "\" stroke=\"" + colors.at(phase) +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fmt_num(left + pw + 38) + "\" y=\"" + detail::fmt_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + std::string(to_string(phase)) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

/// Binary PGM (P5), maxval 255, each 0/1 pixel scaled by 255.
inline std::string composite_pgm(std::span<const std::uint8_t> image, std::size_t width = kCompositeWidth,
                                 std::size_t height = kDigitSide) {
  check_shape(image.size() == width * height, "pgm: pixel count does not match width x height");
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (auto p : image) out.push_back(static_cast<char>(p ? 255 : 0));
  return out;
}

/// Reads a 64x16 P5 image back to 0/1 pixels (threshold at half intensity).
inline std::vector<std::uint8_t> parse_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const auto start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
  };
  if (token() != "P5") throw DataError(DataError::Kind::Format, "not a binary PGM (P5) image");
  const std::string w = token(), h = token(), maxval = token();
  if (w != std::to_string(kCompositeWidth) || h != std::to_string(kDigitSide))
    throw DataError(DataError::Kind::Format, "image must be 64x16, got " + w + "x" + h);
  if (maxval != "255") throw DataError(DataError::Kind::Format, "PGM maxval must be 255");
  ++pos;  // single whitespace after maxval
  if (bytes.size() < pos + kCompositePixels) throw DataError(DataError::Kind::Format, "PGM pixel data truncated");
  std::vector<std::uint8_t> image(kCompositePixels);
  for (std::size_t i = 0; i < kCompositePixels; ++i)
    image[i] = static_cast<unsigned char>(bytes[pos + i]) >= 128 ? 1 : 0;
  return image;
}

}  // namespace tranet
