#ifndef ZETAGAP_TEXT_IO_HPP
#define ZETAGAP_TEXT_IO_HPP

// Small helpers shared by the chain, mixture, model and experiment file formats.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "zetagap/errors.hpp"

namespace zetagap::io {

/// A non-blank, non-comment line with its 1-based position in the source.
struct Line {
  std::size_t number;
  std::string text;
};

/// Splits text into lines, dropping blank lines and '#' comments.
inline std::vector<Line> content_lines(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (raw.find_first_not_of(" \t\r,;") == std::string::npos) continue;
    out.push_back({number, raw});
  }
  return out;
}

inline std::vector<std::string_view> split_fields(std::string_view s, std::string_view delims = " \t\r,;") {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < s.size()) {
    i = s.find_first_not_of(delims, i);
    if (i == std::string_view::npos) break;
    std::size_t j = s.find_first_of(delims, i);
    if (j == std::string_view::npos) j = s.size();
    fields.push_back(s.substr(i, j - i));
    i = j;
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view token, std::size_t line = 0) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    // from_chars rejects "inf"/"nan" spellings in some libstdc++ builds; fall back.
    try {
      std::size_t used = 0;
      v = std::stod(std::string(token), &used);
      if (used != token.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("not a number: '" + std::string(token) + "'", line);
    }
  }
  return v;
}

inline long long parse_int(std::string_view token, std::size_t line = 0) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError("not an integer: '" + std::string(token) + "'", line);
  return v;
}

inline std::vector<double> parse_row(const Line& line) {
  std::vector<double> row;
  for (auto f : split_fields(line.text)) row.push_back(parse_double(f, line.number));
  return row;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

/// Full-precision formatting for numbers that must round-trip.
inline std::string fmt_exact(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace zetagap::io

#endif
