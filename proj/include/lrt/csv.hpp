#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "lrt/errors.hpp"

namespace lrt::detail {

/// %.17g: round-trips every double exactly.
inline void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline std::vector<std::vector<double>> parse_csv(const std::string& text,
                                                  const std::string& expected_header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw FormatError("unexpected CSV header '" + line + "', expected '" + expected_header + "'");
  const std::size_t columns = 1 + static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ','));
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p || (errno == ERANGE && std::abs(v) == HUGE_VAL))
        throw FormatError("line " + std::to_string(line_no) + ": malformed number");
      row.push_back(v);
      if (*end == ',') {
        p = end + 1;
      } else if (*end == '\0') {
        break;
      } else {
        throw FormatError("line " + std::to_string(line_no) + ": unexpected character");
      }
    }
    if (row.size() != columns)
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lrt::detail
