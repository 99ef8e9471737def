#pragma once

// Small helpers shared by the text formats (edge lists, partitions, CSV).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace spillover::text {

/// Splits on spaces, tabs, and commas when `delimiters` includes them.
inline void split_fields(std::string_view line, std::vector<std::string_view>& out,
                         std::string_view delimiters = " \t\r") {
  out.clear();
  std::size_t pos = 0;
  while (pos < line.size()) {
    std::size_t start = line.find_first_not_of(delimiters, pos);
    if (start == std::string_view::npos) break;
    std::size_t end = line.find_first_of(delimiters, start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(start, end - start));
    pos = end;
  }
}

/// Splits on a single separator keeping empty fields (CSV without quoting).
inline void split_exact(std::string_view line, char sep, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      std::string_view last = line.substr(start);
      if (!last.empty() && last.back() == '\r') last.remove_suffix(1);
      out.push_back(last);
      return;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Shortest representation that parses back to the same double.
inline std::string format_roundtrip(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

/// Fixed notation with nine decimals; "nan" for non-finite input.
inline std::string format_fixed9(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[400];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 9);
  (void)ec;
  std::string s(buf, ptr);
  if (s == "-0.000000000") s.erase(0, 1);
  return s;
}

/// `v` rounded to nine decimals, for JSON fields that must diff cleanly.
inline double round9(double v) {
  if (!std::isfinite(v)) return v;
  auto s = format_fixed9(v);
  return parse_double(s).value_or(v);
}

}  // namespace spillover::text
