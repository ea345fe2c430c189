// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "densolve/errors.hpp"
#include "densolve/matrix.hpp"

namespace densolve {

/// Calls made to one operation and the scalar multiply-adds they performed.
struct OpTally {
  std::uint64_t calls = 0;
  std::uint64_t madds = 0;

  bool operator==(const OpTally&) const = default;
};

/// Per-operation tallies of a backend. Multiply-add formulas, for an
/// m x n matrix operand and k the inner or right-hand-side dimension:
///   axpy, dot, nrm2, scal: n     gemv, ger: m*n     gemm: m*n*k
///   trsm (unit lower, b x b): k*b*(b-1)/2          trsm (upper): k*b*(b+1)/2
///   iamax: 0
struct BackendCounters {
  OpTally axpy, dot, nrm2, scal, gemv, ger, gemm, trsm, iamax;

  std::uint64_t total_calls() const {
    return axpy.calls + dot.calls + nrm2.calls + scal.calls + gemv.calls + ger.calls +
           gemm.calls + trsm.calls + iamax.calls;
  }

  std::uint64_t total_madds() const {
    return axpy.madds + dot.madds + nrm2.madds + scal.madds + gemv.madds + ger.madds +
           gemm.madds + trsm.madds + iamax.madds;
  }

  void reset() { *this = BackendCounters{}; }

  bool operator==(const BackendCounters&) const = default;
};

/// BLAS-like operation contract used by every solver.
///
/// The public entry points validate shapes, bump exactly one counter by one
/// call, and forward to the implementation hooks. All matrix operands are
/// column-major views; vectors are contiguous spans. Output operands must not
/// alias inputs.
template <Real T>
class Backend {
public:
  virtual ~Backend() = default;

  virtual std::string_view name() const = 0;

  const BackendCounters& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_.reset(); }

  /// Staging hooks for a backend with separate memory. Called around every
  /// solve with the operands the solve reads and writes. No-ops here.
  virtual void stage_in(std::span<const T>) {}
  virtual void stage_out(std::span<T>) {}

  /// y <- y + alpha x
  void axpy(T alpha, std::span<const T> x, std::span<T> y) {
    detail::require_dims(x.size() == y.size(), "axpy: length mismatch");
    tally(counters_.axpy, x.size());
    do_axpy(alpha, x, y);
  }

  T dot(std::span<const T> x, std::span<const T> y) {
    detail::require_dims(x.size() == y.size(), "dot: length mismatch");
    tally(counters_.dot, x.size());
    return do_dot(x, y);
  }

  /// Euclidean norm without intermediate overflow or underflow.
  T nrm2(std::span<const T> x) {
    tally(counters_.nrm2, x.size());
    return do_nrm2(x);
  }

  /// x <- alpha x
  void scal(T alpha, std::span<T> x) {
    tally(counters_.scal, x.size());
    do_scal(alpha, x);
  }

  /// Index of the first element of largest magnitude.
  std::size_t iamax(std::span<const T> x) {
    detail::require_dims(!x.empty(), "iamax: empty vector");
    tally(counters_.iamax, 0);
    return do_iamax(x);
  }

  /// y <- A x
  void gemv(ConstMatrixView<T> a, std::span<const T> x, std::span<T> y) {
    detail::require_dims(x.size() == a.cols() && y.size() == a.rows(), "gemv: dimension mismatch");
    tally(counters_.gemv, a.rows() * a.cols());
    do_gemv(a, x, y);
  }

  /// A <- A + alpha x y^T
  void ger(T alpha, std::span<const T> x, std::span<const T> y, MatrixView<T> a) {
    detail::require_dims(x.size() == a.rows() && y.size() == a.cols(), "ger: dimension mismatch");
    tally(counters_.ger, a.rows() * a.cols());
    do_ger(alpha, x, y, a);
  }

  /// C <- alpha A B + beta C. With beta == 0 the prior contents of C are ignored.
  void gemm(T alpha, ConstMatrixView<T> a, ConstMatrixView<T> b, T beta, MatrixView<T> c) {
    detail::require_dims(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols(),
                         "gemm: dimension mismatch");
    tally(counters_.gemm, a.rows() * b.cols() * a.cols());
    do_gemm(alpha, a, b, beta, c);
  }

  /// B <- L^{-1} B for unit-lower-triangular L. The stored diagonal and upper
  /// triangle of L are never read.
  void trsm_lower_unit(ConstMatrixView<T> l, MatrixView<T> b) {
    detail::require_dims(l.rows() == l.cols() && b.rows() == l.rows(),
                         "trsm_lower_unit: dimension mismatch");
    const std::size_t n = l.rows();
    tally(counters_.trsm, b.cols() * (n * (n - (n > 0))) / 2);
    do_trsm_lower_unit(l, b);
  }

  /// B <- U^{-1} B for upper-triangular U with nonzero diagonal.
  void trsm_upper(ConstMatrixView<T> u, MatrixView<T> b) {
    detail::require_dims(u.rows() == u.cols() && b.rows() == u.rows(),
                         "trsm_upper: dimension mismatch");
    for (std::size_t i = 0; i < u.rows(); ++i)
      if (u(i, i) == T(0)) throw SingularError("trsm_upper: zero diagonal entry");
    const std::size_t n = u.rows();
    tally(counters_.trsm, b.cols() * (n * (n + 1)) / 2);
    do_trsm_upper(u, b);
  }

protected:
  virtual void do_axpy(T alpha, std::span<const T> x, std::span<T> y) = 0;
  virtual T do_dot(std::span<const T> x, std::span<const T> y) = 0;
  virtual T do_nrm2(std::span<const T> x) = 0;
  virtual void do_scal(T alpha, std::span<T> x) = 0;
  virtual std::size_t do_iamax(std::span<const T> x) = 0;
  virtual void do_gemv(ConstMatrixView<T> a, std::span<const T> x, std::span<T> y) = 0;
  virtual void do_ger(T alpha, std::span<const T> x, std::span<const T> y, MatrixView<T> a) = 0;
  virtual void do_gemm(T alpha, ConstMatrixView<T> a, ConstMatrixView<T> b, T beta,
                       MatrixView<T> c) = 0;
  virtual void do_trsm_lower_unit(ConstMatrixView<T> l, MatrixView<T> b) = 0;
  virtual void do_trsm_upper(ConstMatrixView<T> u, MatrixView<T> b) = 0;

private:
  static void tally(OpTally& t, std::size_t madds) {
    ++t.calls;
    t.madds += madds;
  }

  BackendCounters counters_;
};

namespace detail {

// LAPACK-style scaled sum of squares in one pass.
template <Real T>
T scaled_nrm2(std::span<const T> x) {
  T scale = 0;
  T ssq = 1;
  for (T v : x) {
    if (v == T(0)) continue;
    const T a = std::abs(v);
    if (scale < a) {
      ssq = T(1) + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

template <Real T>
std::size_t first_iamax(std::span<const T> x) {
  std::size_t best = 0;
  T best_abs = std::abs(x[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T a = std::abs(x[i]);
    if (a > best_abs) {
      best = i;
      best_abs = a;
    }
  }
  return best;
}

}  // namespace detail

/// Strictly sequential textbook loops.
template <Real T>
class ReferenceBackend final : public Backend<T> {
public:
  std::string_view name() const override { return "reference"; }

protected:
  void do_axpy(T alpha, std::span<const T> x, std::span<T> y) override {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  }

  T do_dot(std::span<const T> x, std::span<const T> y) override {
    T s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  }

  T do_nrm2(std::span<const T> x) override { return detail::scaled_nrm2(x); }

  void do_scal(T alpha, std::span<T> x) override {
    for (T& v : x) v *= alpha;
  }

  std::size_t do_iamax(std::span<const T> x) override { return detail::first_iamax(x); }

  void do_gemv(ConstMatrixView<T> a, std::span<const T> x, std::span<T> y) override {
    for (T& v : y) v = T(0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T xj = x[j];
      for (std::size_t i = 0; i < a.rows(); ++i) y[i] += a(i, j) * xj;
    }
  }

  void do_ger(T alpha, std::span<const T> x, std::span<const T> y, MatrixView<T> a) override {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T t = alpha * y[j];
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) += x[i] * t;
    }
  }

  void do_gemm(T alpha, ConstMatrixView<T> a, ConstMatrixView<T> b, T beta,
               MatrixView<T> c) override {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      for (std::size_t i = 0; i < c.rows(); ++i) c(i, j) = beta == T(0) ? T(0) : beta * c(i, j);
      for (std::size_t p = 0; p < a.cols(); ++p) {
        const T t = alpha * b(p, j);
        for (std::size_t i = 0; i < c.rows(); ++i) c(i, j) += a(i, p) * t;
      }
    }
  }

  void do_trsm_lower_unit(ConstMatrixView<T> l, MatrixView<T> b) override {
    const std::size_t n = l.rows();
    for (std::size_t c = 0; c < b.cols(); ++c)
      for (std::size_t k = 0; k < n; ++k) {
        const T zk = b(k, c);
        for (std::size_t i = k + 1; i < n; ++i) b(i, c) -= l(i, k) * zk;
      }
  }

  void do_trsm_upper(ConstMatrixView<T> u, MatrixView<T> b) override {
    const std::size_t n = u.rows();
    for (std::size_t c = 0; c < b.cols(); ++c)
      for (std::size_t k = n; k-- > 0;) {
        b(k, c) /= u(k, k);
        const T zk = b(k, c);
        for (std::size_t i = 0; i < k; ++i) b(i, c) -= u(i, k) * zk;
      }
  }
};

}  // namespace densolve
