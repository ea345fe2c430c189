// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "densolve/core.hpp"

namespace densolve {

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-comment, non-blank line.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '%' || blank(line)) continue;
      return true;
    }
    return false;
  }

  bool raw(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::size_t number() const noexcept { return number_; }

private:
  std::istream& in_;
  std::size_t number_ = 0;
};

}  // namespace detail

/// Parses a Matrix Market stream with `real` field in `array` or
/// `coordinate` format, `general` or `symmetric` symmetry. Symmetric input
/// lists one triangle and is mirrored. File indices are 1-based.
template <Real T>
DenseMatrix<T> parse_matrix_market(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.raw(line)) throw ParseError("empty input", 1);

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", 1);
  object = detail::lowercase(object);
  format = detail::lowercase(format);
  field = detail::lowercase(field);
  symmetry = detail::lowercase(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", 1);
  if (format != "array" && format != "coordinate")
    throw ParseError("unsupported format '" + format + "'", 1);
  if (field != "real") throw ParseError("unsupported field '" + field + "', expected real", 1);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
  const bool symmetric = symmetry == "symmetric";
  const bool coordinate = format == "coordinate";

  if (!reader.next(line)) throw ParseError("missing size line", reader.number() + 1);
  long long rows = -1, cols = -1, nnz = -1;
  {
    std::istringstream sizes(line);
    sizes >> rows >> cols;
    if (coordinate) sizes >> nnz;
    std::string extra;
    if (sizes.fail() || rows < 0 || cols < 0 || (coordinate && nnz < 0) || (sizes >> extra))
      throw ParseError("malformed size line", reader.number());
  }
  if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", reader.number());

  const auto m = static_cast<std::size_t>(rows);
  const auto n = static_cast<std::size_t>(cols);
  DenseMatrix<T> a(m, n);

  auto read_value = [&](std::istringstream& ss) {
    double v;
    if (!(ss >> v)) throw ParseError("malformed entry", reader.number());
    std::string extra;
    if (ss >> extra) throw ParseError("trailing data in entry", reader.number());
    return static_cast<T>(v);
  };

  if (coordinate) {
    for (long long e = 0; e < nnz; ++e) {
      if (!reader.next(line))
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(e),
                         reader.number() + 1);
      std::istringstream ss(line);
      long long i, j;
      if (!(ss >> i >> j)) throw ParseError("malformed entry", reader.number());
      if (i < 1 || j < 1 || i > rows || j > cols) throw ParseError("index out of range", reader.number());
      const T v = read_value(ss);
      const auto r = static_cast<std::size_t>(i - 1);
      const auto c = static_cast<std::size_t>(j - 1);
      a(r, c) = v;
      if (symmetric) a(c, r) = v;
    }
  } else {
    // column-major; symmetric arrays list the lower triangle only
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = symmetric ? j : 0; i < m; ++i) {
        if (!reader.next(line)) throw ParseError("too few array entries", reader.number() + 1);
        std::istringstream ss(line);
        const T v = read_value(ss);
        a(i, j) = v;
        if (symmetric) a(j, i) = v;
      }
    }
  }
  if (reader.next(line)) throw ParseError("unexpected data after last entry", reader.number());
  return a;
}

template <Real T>
DenseMatrix<T> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_matrix_market<T>(in);
}

}  // namespace densolve
