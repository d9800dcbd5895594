#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

#include "pnml/core.hpp"

namespace pnml {

/// Result numbers: 12 significant digits, '.' decimal, "inf"/"-inf" for
/// infinities.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Value as it appears in output: rounded to 12 significant digits.
inline double round_for_output(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] inline void malformed(std::size_t line, const std::string& why) {
  fail(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + why);
}

}  // namespace detail

/// Parses the `x,y` dataset format: header row, then one sample per row with a
/// finite feature and a 0/1 label. Blank lines are skipped.
inline Dataset parse_dataset(std::istream& in) {
  Dataset data(LabelSpace::binary());
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view row = detail::trim(raw);
    if (!header_seen) {
      std::string_view h = row;
      if (h.size() >= 3 && h.substr(0, 3) == "\xEF\xBB\xBF") h.remove_prefix(3);
      const auto comma = h.find(',');
      if (comma == std::string_view::npos || detail::trim(h.substr(0, comma)) != "x" ||
          detail::trim(h.substr(comma + 1)) != "y")
        detail::malformed(line, "expected header 'x,y'");
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      detail::malformed(line, "expected two comma-separated fields");
    double x = 0.0, y = 0.0;
    if (!detail::parse_double(row.substr(0, comma), x) || !std::isfinite(x))
      detail::malformed(line, "feature is not a finite number");
    if (!detail::parse_double(row.substr(comma + 1), y))
      detail::malformed(line, "label is not a number");
    if (y != 0.0 && y != 1.0)
      detail::fail(ErrorCode::NonBinaryLabel,
                   "line " + std::to_string(line) + ": label must be 0 or 1");
    data.push_back({x, y == 1.0 ? Label{1} : Label{0}});
  }
  if (!header_seen) detail::malformed(1, "missing header 'x,y'");
  return data;
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::fail(ErrorCode::InvalidArgument, "cannot open dataset '" + path + "'");
  return parse_dataset(in);
}

/// Writes features with round-trip precision.
inline void write_dataset(std::ostream& out, const Dataset& data) {
  detail::require(data.label_space().size() == 2, "dataset files hold binary labels");
  out << "x,y\n";
  char buf[40];
  for (const auto& s : data.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g", s.x);
    out << buf << ',' << s.y << '\n';
  }
}

}  // namespace pnml
