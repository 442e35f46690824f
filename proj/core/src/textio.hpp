#pragma once

// Internal line-oriented text IO helpers shared by dataset/convert/report.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "spade/error.hpp"

namespace spade::textio {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open {} for reading", path.string()));
  }
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!out) {
    throw IoError(fmt::format("cannot open {} for writing", path.string()));
  }
  return out;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
T parse_number(std::string_view token, const std::string& context) {
  T value{};
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(fmt::format("{}: cannot parse '{}'", context, std::string(token)));
  }
  return value;
}

/// Splits on any run of spaces/tabs.
inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Parses a `key=value` line; throws if the key does not match.
inline std::string_view expect_kv(std::string_view line, std::string_view key,
                                  const std::string& context) {
  const auto pos = line.find('=');
  if (pos == std::string_view::npos || line.substr(0, pos) != key) {
    throw ValidationError(fmt::format("{}: expected '{}=...', got '{}'", context, key,
                                      std::string(line)));
  }
  return line.substr(pos + 1);
}

/// Full-precision decimal rendering that round-trips doubles exactly.
inline std::string full_precision(double v) { return fmt::format("{:.17g}", v); }

}  // namespace spade::textio
