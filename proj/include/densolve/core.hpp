// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "densolve/errors.hpp"
#include "densolve/matrix.hpp"

namespace densolve {

enum class Precision { f32, f64 };

inline std::string_view to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

inline Precision parse_precision(std::string_view s) {
  if (s == "f32") return Precision::f32;
  if (s == "f64") return Precision::f64;
  throw std::invalid_argument("unknown precision '" + std::string(s) + "'");
}

template <Real T>
constexpr Precision precision_of() {
  return std::is_same_v<T, float> ? Precision::f32 : Precision::f64;
}

enum class Orthogonalization { classical, modified };

/// Why an iteration or factorization stopped early.
enum class Breakdown {
  zero_pivot,         // LU
  nonpositive_pivot,  // Cholesky
  rho_breakdown,      // BiCGSTAB: shadow residual became orthogonal to r
  omega_breakdown,    // BiCGSTAB: stabilizing step degenerated
  happy_breakdown,    // GMRES: invariant Krylov space, exact solution reached
  stagnation,         // GMRES: a full restart cycle did not reduce the residual
};

inline std::string_view to_string(Breakdown b) {
  switch (b) {
    case Breakdown::zero_pivot: return "zero-pivot";
    case Breakdown::nonpositive_pivot: return "nonpositive-pivot";
    case Breakdown::rho_breakdown: return "rho-breakdown";
    case Breakdown::omega_breakdown: return "omega-breakdown";
    case Breakdown::happy_breakdown: return "happy-breakdown";
    case Breakdown::stagnation: return "stagnation";
  }
  return "unknown";
}

struct SolverConfig {
  double tolerance = 1e-4;
  /// 0 selects 10 * n.
  std::size_t max_iterations = 0;
  std::size_t restart_m = 35;
  std::size_t block_size_b = 64;
  Orthogonalization orthogonalization = Orthogonalization::modified;

  void validate() const {
    if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
    if (restart_m < 1) throw std::invalid_argument("restart must be at least 1");
    if (block_size_b < 1) throw std::invalid_argument("block size must be at least 1");
  }

  std::size_t iteration_cap(std::size_t n) const {
    return max_iterations == 0 ? 10 * n : max_iterations;
  }
};

struct SolveReport {
  bool converged = false;
  std::size_t iterations = 0;
  double final_relative_residual = 0;
  /// Entry 0 is the initial residual; one entry per iteration after that.
  std::vector<double> residual_history;
  std::optional<Breakdown> breakdown;
  std::chrono::duration<double> wall_time{0};
  /// GMRES only: iteration count at the start of each restart cycle.
  std::vector<std::size_t> cycle_starts;
};

/// Result of an iterative solve.
template <Real T>
struct Solution {
  Vector<T> x;
  SolveReport report;
};

/// Packed LU: U on and above the diagonal, strict lower part of unit-lower L below it.
template <Real T>
struct LuFactors {
  DenseMatrix<T> packed;
  PivotVector pivots;
  bool singular = false;
  /// First column whose pivot was exactly zero, if any.
  std::optional<std::size_t> zero_pivot_column;
  std::size_t block_size = 0;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return packed.rows(); }

  DenseMatrix<T> lower() const {
    const std::size_t n = size();
    DenseMatrix<T> l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      l(j, j) = T(1);
      for (std::size_t i = j + 1; i < n; ++i) l(i, j) = packed(i, j);
    }
    return l;
  }

  DenseMatrix<T> upper() const {
    const std::size_t n = size();
    DenseMatrix<T> u(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i <= j; ++i) u(i, j) = packed(i, j);
    return u;
  }
};

template <Real T>
struct CholeskyFactor {
  DenseMatrix<T> l;

  std::size_t size() const noexcept { return l.rows(); }
};

template <Real T>
double frobenius_norm(ConstMatrixView<T> a) {
  double s = 0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) s += double(a(i, j)) * double(a(i, j));
  return std::sqrt(s);
}

template <Real T>
double frobenius_norm(const DenseMatrix<T>& a) {
  return frobenius_norm<T>(a.view());
}

template <Real T>
double max_abs(ConstMatrixView<T> a) {
  double m = 0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, double(std::abs(a(i, j))));
  return m;
}

namespace detail {

template <Real T>
void require_symmetric(const DenseMatrix<T>& a) {
  detail::require_dims(a.square(), "matrix must be square");
  const double tol = 10.0 * double(unit_roundoff<T>()) * max_abs<T>(a.view());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i)
      if (std::abs(double(a(i, j)) - double(a(j, i))) > tol)
        throw SymmetryError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
}

}  // namespace detail

/// ||b - A x||_2 / ||b||_2, accumulated in the working precision.
template <Real T>
T relative_residual(const DenseMatrix<T>& a, std::span<const T> x, std::span<const T> b) {
  detail::require_dims(a.square(), "relative_residual: matrix must be square");
  detail::require_dims(x.size() == a.cols() && b.size() == a.rows(),
                       "relative_residual: vector length mismatch");
  Vector<T> r(b.begin(), b.end());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const T xj = x[j];
    const auto col = a.col(j);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= col[i] * xj;
  }
  T bb = 0, rr = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    bb += b[i] * b[i];
    rr += r[i] * r[i];
  }
  if (bb == T(0)) throw DegenerateRhsError("relative_residual: ||b|| is zero");
  return std::sqrt(rr) / std::sqrt(bb);
}

template <Real T>
T relative_residual(const DenseMatrix<T>& a, const Vector<T>& x, const Vector<T>& b) {
  return relative_residual<T>(a, std::span<const T>(x), std::span<const T>(b));
}

}  // namespace densolve
