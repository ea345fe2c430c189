// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include <omp.h>

#include "densolve/backend.hpp"

namespace densolve {

struct BlockedOptions {
  /// Edge of the square C tile one task owns in gemm.
  std::size_t tile = 64;
  /// 0 selects every available core.
  int threads = 0;
};

/// Cache-blocked, OpenMP-parallel backend.
///
/// Work is split with static schedules and every output element is owned by
/// one task, so results are bitwise reproducible for any thread count.
template <Real T>
class BlockedBackend final : public Backend<T> {
public:
  explicit BlockedBackend(BlockedOptions opts = {}) : opts_(opts) {
    if (opts_.tile == 0) opts_.tile = 64;
    threads_ = opts_.threads > 0 ? opts_.threads : omp_get_max_threads();
  }

  std::string_view name() const override { return "blocked"; }
  const BlockedOptions& options() const noexcept { return opts_; }
  int threads() const noexcept { return threads_; }

protected:
  // Below this many multiply-adds an operation runs on the calling thread.
  static constexpr std::size_t kParallelThreshold = 1 << 16;

  void do_axpy(T alpha, std::span<const T> x, std::span<T> y) override {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const T* xp = x.data();
    T* yp = y.data();
#pragma omp parallel for simd schedule(static) num_threads(threads_) if (x.size() > kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) yp[i] += alpha * xp[i];
  }

  T do_dot(std::span<const T> x, std::span<const T> y) override {
    std::array<T, 4> acc{};
    const std::size_t n = x.size();
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4)
      for (std::size_t u = 0; u < 4; ++u) acc[u] += x[i + u] * y[i + u];
    for (std::size_t i = n4; i < n; ++i) acc[0] += x[i] * y[i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }

  T do_nrm2(std::span<const T> x) override {
    // Plain sum of squares unless it left the safe range.
    T ssq = 0;
    for (T v : x) ssq += v * v;
    constexpr T lo = std::numeric_limits<T>::min() / std::numeric_limits<T>::epsilon();
    constexpr T hi = std::numeric_limits<T>::max() / T(4);
    if (std::isfinite(ssq) && (ssq == T(0) || ssq > lo) && ssq < hi) {
      // An all-denormal vector also sums to something tiny; zero only if all zero.
      if (ssq == T(0)) {
        for (T v : x)
          if (v != T(0)) return detail::scaled_nrm2(x);
      }
      return std::sqrt(ssq);
    }
    return detail::scaled_nrm2(x);
  }

  void do_scal(T alpha, std::span<T> x) override {
    for (T& v : x) v *= alpha;
  }

  std::size_t do_iamax(std::span<const T> x) override { return detail::first_iamax(x); }

  void do_gemv(ConstMatrixView<T> a, std::span<const T> x, std::span<T> y) override {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t chunk = 256;
    const std::ptrdiff_t nchunks = static_cast<std::ptrdiff_t>((m + chunk - 1) / chunk);
#pragma omp parallel for schedule(static) num_threads(threads_) if (m * n > kParallelThreshold)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
      const std::size_t i0 = static_cast<std::size_t>(c) * chunk;
      const std::size_t i1 = std::min(m, i0 + chunk);
      T* yp = y.data();
      for (std::size_t i = i0; i < i1; ++i) yp[i] = T(0);
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        const T x0 = x[j], x1 = x[j + 1], x2 = x[j + 2], x3 = x[j + 3];
        const T* a0 = &a(0, j);
        const T* a1 = &a(0, j + 1);
        const T* a2 = &a(0, j + 2);
        const T* a3 = &a(0, j + 3);
        for (std::size_t i = i0; i < i1; ++i)
          yp[i] += a0[i] * x0 + a1[i] * x1 + a2[i] * x2 + a3[i] * x3;
      }
      for (; j < n; ++j) {
        const T xj = x[j];
        const T* aj = &a(0, j);
        for (std::size_t i = i0; i < i1; ++i) yp[i] += aj[i] * xj;
      }
    }
  }

  void do_ger(T alpha, std::span<const T> x, std::span<const T> y, MatrixView<T> a) override {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.cols());
    const std::size_t m = a.rows();
#pragma omp parallel for schedule(static) num_threads(threads_) if (m * a.cols() > kParallelThreshold)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const T t = alpha * y[static_cast<std::size_t>(j)];
      T* aj = &a(0, static_cast<std::size_t>(j));
      for (std::size_t i = 0; i < m; ++i) aj[i] += x[i] * t;
    }
  }

  void do_gemm(T alpha, ConstMatrixView<T> a, ConstMatrixView<T> b, T beta,
               MatrixView<T> c) override {
    const std::size_t m = c.rows();
    const std::size_t n = c.cols();
    const std::size_t k = a.cols();
    if (m == 0 || n == 0) return;
    const std::size_t tile = opts_.tile;
    const std::size_t mt = (m + tile - 1) / tile;
    const std::size_t nt = (n + tile - 1) / tile;
    const std::ptrdiff_t tiles = static_cast<std::ptrdiff_t>(mt * nt);
#pragma omp parallel num_threads(threads_) if (m * n * k > kParallelThreshold)
    {
      std::vector<T> apack;
      std::vector<T> bpack;
#pragma omp for schedule(static)
      for (std::ptrdiff_t t = 0; t < tiles; ++t) {
        // column-tile major so neighbouring tasks share B
        const std::size_t tj = static_cast<std::size_t>(t) / mt;
        const std::size_t ti = static_cast<std::size_t>(t) % mt;
        const std::size_t i0 = ti * tile, i1 = std::min(m, i0 + tile);
        const std::size_t j0 = tj * tile, j1 = std::min(n, j0 + tile);
        compute_tile(alpha, a, b, beta, c, i0, i1, j0, j1, apack, bpack);
      }
    }
  }

  void do_trsm_lower_unit(ConstMatrixView<T> l, MatrixView<T> b) override {
    const std::size_t n = l.rows();
    const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(b.cols());
#pragma omp parallel for schedule(static) num_threads(threads_) if (n * n * b.cols() > 2 * kParallelThreshold)
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      T* z = &b(0, static_cast<std::size_t>(c));
      for (std::size_t k = 0; k < n; ++k) {
        const T zk = z[k];
        const T* lk = &l(0, k);
        for (std::size_t i = k + 1; i < n; ++i) z[i] -= lk[i] * zk;
      }
    }
  }

  void do_trsm_upper(ConstMatrixView<T> u, MatrixView<T> b) override {
    const std::size_t n = u.rows();
    const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(b.cols());
#pragma omp parallel for schedule(static) num_threads(threads_) if (n * n * b.cols() > 2 * kParallelThreshold)
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      T* z = &b(0, static_cast<std::size_t>(c));
      for (std::size_t k = n; k-- > 0;) {
        z[k] /= u(k, k);
        const T zk = z[k];
        const T* uk = &u(0, k);
        for (std::size_t i = 0; i < k; ++i) z[i] -= uk[i] * zk;
      }
    }
  }

private:
  static constexpr std::size_t kMr = 8;
  static constexpr std::size_t kNr = 4;
  static constexpr std::size_t kKc = 256;

  // C(i0:i1, j0:j1) <- alpha A(i0:i1, :) B(:, j0:j1) + beta C(i0:i1, j0:j1)
  static void compute_tile(T alpha, ConstMatrixView<T> a, ConstMatrixView<T> b, T beta,
                           MatrixView<T> c, std::size_t i0, std::size_t i1, std::size_t j0,
                           std::size_t j1, std::vector<T>& apack, std::vector<T>& bpack) {
    const std::size_t k = a.cols();
    const std::size_t mr_blocks = (i1 - i0 + kMr - 1) / kMr;
    const std::size_t nr_blocks = (j1 - j0 + kNr - 1) / kNr;

    for (std::size_t j = j0; j < j1; ++j)
      for (std::size_t i = i0; i < i1; ++i) c(i, j) = beta == T(0) ? T(0) : beta * c(i, j);

    for (std::size_t p0 = 0; p0 < k; p0 += kKc) {
      const std::size_t kc = std::min(kKc, k - p0);

      // A micro-panels: kMr rows interleaved per k step, zero padded
      apack.assign(mr_blocks * kMr * kc, T(0));
      for (std::size_t ib = 0; ib < mr_blocks; ++ib) {
        T* dst = apack.data() + ib * kMr * kc;
        const std::size_t r0 = i0 + ib * kMr;
        const std::size_t rn = std::min(kMr, i1 - r0);
        for (std::size_t p = 0; p < kc; ++p) {
          const T* src = &a(r0, p0 + p);
          for (std::size_t r = 0; r < rn; ++r) dst[p * kMr + r] = src[r];
        }
      }
      // B micro-panels: kNr columns interleaved per k step, pre-scaled by alpha
      bpack.assign(nr_blocks * kNr * kc, T(0));
      for (std::size_t jb = 0; jb < nr_blocks; ++jb) {
        T* dst = bpack.data() + jb * kNr * kc;
        const std::size_t c0 = j0 + jb * kNr;
        const std::size_t cn = std::min(kNr, j1 - c0);
        for (std::size_t q = 0; q < cn; ++q) {
          const T* src = &b(p0, c0 + q);
          for (std::size_t p = 0; p < kc; ++p) dst[p * kNr + q] = alpha * src[p];
        }
      }

      for (std::size_t jb = 0; jb < nr_blocks; ++jb) {
        const std::size_t c0 = j0 + jb * kNr;
        const std::size_t cn = std::min(kNr, j1 - c0);
        for (std::size_t ib = 0; ib < mr_blocks; ++ib) {
          const std::size_t r0 = i0 + ib * kMr;
          const std::size_t rn = std::min(kMr, i1 - r0);
          micro_kernel(kc, apack.data() + ib * kMr * kc, bpack.data() + jb * kNr * kc, c, r0, rn,
                       c0, cn);
        }
      }
    }
  }

  static void micro_kernel(std::size_t kc, const T* __restrict ap, const T* __restrict bp,
                           MatrixView<T> c, std::size_t r0, std::size_t rn, std::size_t c0,
                           std::size_t cn) {
    T acc[kNr][kMr] = {};
    for (std::size_t p = 0; p < kc; ++p) {
      const T* av = ap + p * kMr;
      const T* bv = bp + p * kNr;
      for (std::size_t q = 0; q < kNr; ++q) {
        const T bq = bv[q];
        for (std::size_t r = 0; r < kMr; ++r) acc[q][r] += av[r] * bq;
      }
    }
    for (std::size_t q = 0; q < cn; ++q) {
      T* cc = &c(r0, c0 + q);
      for (std::size_t r = 0; r < rn; ++r) cc[r] += acc[q][r];
    }
  }

  BlockedOptions opts_;
  int threads_ = 1;
};

}  // namespace densolve
