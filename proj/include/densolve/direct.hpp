// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "densolve/backend.hpp"
#include "densolve/core.hpp"

namespace densolve {

namespace detail {

// Right-looking BLAS-2 factorization of columns [k0, k1) over rows k0..n-1.
// Row interchanges are applied across the full width of `a` so the packed
// L to the left of the panel stays consistent with P A = L U. The trailing
// rank-1 updates are confined to the panel columns.
template <Real T>
void factor_panel(MatrixView<T> a, std::size_t k0, std::size_t k1, LuFactors<T>& f,
                  Backend<T>& be) {
  const std::size_t n = a.rows();
  std::vector<T> row;
  for (std::size_t i = k0; i < k1; ++i) {
    const auto tail = a.col(i).subspan(i);
    const std::size_t v = i + be.iamax(tail);
    f.pivots[i] = v;
    if (v != i)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(i, j), a(v, j));

    const T pivot = a(i, i);
    if (pivot == T(0)) {
      // tail is entirely zero; nothing to eliminate
      if (!f.singular) f.zero_pivot_column = i;
      f.singular = true;
      continue;
    }
    if (i + 1 == n) continue;
    be.scal(T(1) / pivot, a.col(i).subspan(i + 1));
    if (i + 1 < k1) {
      row.resize(k1 - i - 1);
      for (std::size_t j = i + 1; j < k1; ++j) row[j - i - 1] = a(i, j);
      be.ger(T(-1), std::span<const T>(a.col(i).subspan(i + 1)), std::span<const T>(row),
             a.block(i + 1, i + 1, n - i - 1, k1 - i - 1));
    }
  }
}

template <Real T>
LuFactors<T> start_factors(const DenseMatrix<T>& a) {
  detail::require_dims(a.square(), "LU factorization needs a square matrix");
  LuFactors<T> f;
  f.packed = a;
  f.pivots = PivotVector(std::vector<std::size_t>(a.rows(), 0));
  return f;
}

}  // namespace detail

/// Right-looking LU with partial pivoting, one rank-1 update per column.
///
/// A zero pivot column is skipped and the result is flagged singular; solving
/// with such factors throws.
template <Real T>
LuFactors<T> lu_factor_unblocked(const DenseMatrix<T>& a, Backend<T>& be) {
  auto f = detail::start_factors(a);
  f.block_size = 1;
  detail::factor_panel(f.packed.view(), 0, a.cols(), f, be);
  return f;
}

/// Blocked LU with delayed updating.
///
/// Each panel of at most `block` columns is factored with BLAS-2 operations,
/// the block row right of it is solved with one unit-lower trsm, and the
/// trailing submatrix receives a single rank-`block` gemm update. Pivots and
/// the packed layout match `lu_factor_unblocked`.
template <Real T>
LuFactors<T> lu_factor_blocked(const DenseMatrix<T>& a, std::size_t block, Backend<T>& be) {
  if (block == 0) throw std::invalid_argument("block size must be at least 1");
  auto f = detail::start_factors(a);
  const std::size_t n = a.rows();
  if (block > n && n > 0) {
    f.warnings.push_back("block size " + std::to_string(block) + " clamped to " +
                         std::to_string(n));
    block = n;
  }
  f.block_size = block;
  auto w = f.packed.view();
  for (std::size_t kb = 0; kb < n; kb += block) {
    const std::size_t bf = std::min(kb + block, n);
    detail::factor_panel(w, kb, bf, f, be);
    if (bf == n) break;
    const std::size_t rest = n - bf;
    const std::size_t width = bf - kb;
    // U01 = L00^{-1} A01
    be.trsm_lower_unit(w.block(kb, kb, width, width), w.block(kb, bf, width, rest));
    // A11 <- A11 - L10 U01
    be.gemm(T(-1), w.block(bf, kb, rest, width), w.block(kb, bf, width, rest), T(1),
            w.block(bf, bf, rest, rest));
  }
  return f;
}

/// Blocked right-looking Cholesky, A = L L^T.
///
/// Throws SymmetryError for asymmetric input and NotSpdError, carrying the
/// failing column, when a nonpositive pivot appears.
template <Real T>
CholeskyFactor<T> cholesky_factor(const DenseMatrix<T>& a, std::size_t block, Backend<T>& be) {
  if (block == 0) throw std::invalid_argument("block size must be at least 1");
  detail::require_symmetric(a);
  const std::size_t n = a.rows();
  block = std::min(block, std::max<std::size_t>(n, 1));

  CholeskyFactor<T> f{a};
  auto w = f.l.view();
  DenseMatrix<T> panel_t;
  for (std::size_t kb = 0; kb < n; kb += block) {
    const std::size_t bf = std::min(kb + block, n);
    for (std::size_t j = kb; j < bf; ++j) {
      const T d = w(j, j);
      if (!(d > T(0)))
        throw NotSpdError("nonpositive pivot at column " + std::to_string(j), j);
      const T ljj = std::sqrt(d);
      w(j, j) = ljj;
      if (j + 1 == n) continue;
      const auto below = w.col(j).subspan(j + 1);
      be.scal(T(1) / ljj, below);
      if (j + 1 < bf)
        be.ger(T(-1), std::span<const T>(below), std::span<const T>(below.first(bf - j - 1)),
               w.block(j + 1, j + 1, n - j - 1, bf - j - 1));
    }
    if (bf == n) break;

    // A11 <- A11 - L10 L10^T, lower block columns only
    const std::size_t rest = n - bf;
    const std::size_t width = bf - kb;
    panel_t = DenseMatrix<T>(width, rest);
    for (std::size_t i = 0; i < rest; ++i)
      for (std::size_t p = 0; p < width; ++p) panel_t(p, i) = w(bf + i, kb + p);
    for (std::size_t jb = bf; jb < n; jb += block) {
      const std::size_t je = std::min(jb + block, n);
      be.gemm(T(-1), w.block(jb, kb, n - jb, width),
              panel_t.view().block(0, jb - bf, width, je - jb), T(1),
              w.block(jb, jb, n - jb, je - jb));
    }
  }
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) w(i, j) = T(0);
  return f;
}

/// Solves L y = b reading only the lower triangle of `l`.
template <Real T>
Vector<T> forward_substitution(const DenseMatrix<T>& l, std::span<const T> b,
                               bool unit_diagonal) {
  detail::require_dims(l.square() && b.size() == l.rows(), "forward_substitution: dimension mismatch");
  const std::size_t n = l.rows();
  if (!unit_diagonal)
    for (std::size_t k = 0; k < n; ++k)
      if (l(k, k) == T(0)) throw SingularError("forward_substitution: zero diagonal entry");
  Vector<T> y(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (!unit_diagonal) y[k] /= l(k, k);
    const T yk = y[k];
    const auto lk = l.col(k);
    for (std::size_t i = k + 1; i < n; ++i) y[i] -= lk[i] * yk;
  }
  return y;
}

/// Solves U x = y reading only the upper triangle of `u`.
template <Real T>
Vector<T> backward_substitution(const DenseMatrix<T>& u, std::span<const T> y) {
  detail::require_dims(u.square() && y.size() == u.rows(), "backward_substitution: dimension mismatch");
  const std::size_t n = u.rows();
  for (std::size_t k = 0; k < n; ++k)
    if (u(k, k) == T(0)) throw SingularError("backward_substitution: zero diagonal entry");
  Vector<T> x(y.begin(), y.end());
  for (std::size_t k = n; k-- > 0;) {
    x[k] /= u(k, k);
    const T xk = x[k];
    const auto uk = u.col(k);
    for (std::size_t i = 0; i < k; ++i) x[i] -= uk[i] * xk;
  }
  return x;
}

template <Real T>
Vector<T> forward_substitution(const DenseMatrix<T>& l, const Vector<T>& b, bool unit_diagonal) {
  return forward_substitution(l, std::span<const T>(b), unit_diagonal);
}

template <Real T>
Vector<T> backward_substitution(const DenseMatrix<T>& u, const Vector<T>& y) {
  return backward_substitution(u, std::span<const T>(y));
}

template <Real T>
Vector<T> lu_solve(const LuFactors<T>& f, std::span<const T> b) {
  if (f.singular) throw SingularError("lu_solve: factors are singular");
  detail::require_dims(b.size() == f.size(), "lu_solve: length mismatch");
  Vector<T> pb(b.begin(), b.end());
  f.pivots.apply(std::span<T>(pb));
  const auto y = forward_substitution<T>(f.packed, pb, true);
  return backward_substitution<T>(f.packed, y);
}

template <Real T>
Vector<T> lu_solve(const LuFactors<T>& f, const Vector<T>& b) {
  return lu_solve<T>(f, std::span<const T>(b));
}

/// Solves A X = B for several right-hand sides with two trsm calls.
template <Real T>
DenseMatrix<T> lu_solve(const LuFactors<T>& f, const DenseMatrix<T>& b, Backend<T>& be) {
  if (f.singular) throw SingularError("lu_solve: factors are singular");
  detail::require_dims(b.rows() == f.size(), "lu_solve: row count mismatch");
  DenseMatrix<T> x = b;
  for (std::size_t c = 0; c < x.cols(); ++c) f.pivots.apply(x.col(c));
  be.trsm_lower_unit(f.packed.view(), x.view());
  be.trsm_upper(f.packed.view(), x.view());
  return x;
}

template <Real T>
Vector<T> cholesky_solve(const CholeskyFactor<T>& f, std::span<const T> b) {
  detail::require_dims(b.size() == f.size(), "cholesky_solve: length mismatch");
  const std::size_t n = f.size();
  auto x = forward_substitution<T>(f.l, b, false);
  // L^T x = y, row i of L^T is column i of L
  for (std::size_t i = n; i-- > 0;) {
    const auto li = f.l.col(i);
    T s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= li[j] * x[j];
    x[i] = s / li[i];
  }
  return x;
}

template <Real T>
Vector<T> cholesky_solve(const CholeskyFactor<T>& f, const Vector<T>& b) {
  return cholesky_solve<T>(f, std::span<const T>(b));
}

/// det(A) from its factors: product of U's diagonal with the interchange sign.
template <Real T>
double determinant(const LuFactors<T>& f) {
  if (f.singular) return 0.0;
  double d = f.pivots.odd() ? -1.0 : 1.0;
  for (std::size_t i = 0; i < f.size(); ++i) d *= double(f.packed(i, i));
  return d;
}

}  // namespace densolve
