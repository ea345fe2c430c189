// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace densolve {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A right-hand side with zero norm was passed where a relative measure is needed.
class DegenerateRhsError : public Error {
public:
  using Error::Error;
};

/// Zero pivot or zero diagonal entry.
class SingularError : public Error {
public:
  using Error::Error;
};

/// Input expected to be symmetric is not, within tolerance.
class SymmetryError : public Error {
public:
  using Error::Error;
};

/// A nonpositive pivot or curvature was met where positive definiteness is required.
class NotSpdError : public Error {
public:
  NotSpdError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  /// Elimination step or iteration where the failure was detected.
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline void require_dims(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail

}  // namespace densolve
