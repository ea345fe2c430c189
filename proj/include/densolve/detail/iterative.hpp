// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <span>

#include "densolve/backend.hpp"
#include "densolve/core.hpp"

namespace densolve::detail {

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::chrono::duration<double> elapsed() const {
    return std::chrono::steady_clock::now() - start_;
  }

private:
  std::chrono::steady_clock::time_point start_;
};

template <Real T>
void check_system(const DenseMatrix<T>& a, std::span<const T> b, std::span<const T> x0) {
  require_dims(a.square(), "system matrix must be square");
  require_dims(b.size() == a.rows() && x0.size() == a.rows(), "vector length mismatch");
}

// r <- b - A x through the backend (one gemv, one axpy); returns ||r||.
template <Real T>
T residual(ConstMatrixView<T> a, std::span<const T> x, std::span<const T> b, std::span<T> r,
           std::span<T> tmp, Backend<T>& be) {
  be.gemv(a, x, tmp);
  std::copy(b.begin(), b.end(), r.begin());
  be.axpy(T(-1), std::span<const T>(tmp), r);
  return be.nrm2(std::span<const T>(r));
}

// Zero right-hand side: x = 0 is exact.
template <Real T>
Solution<T> zero_rhs_solution(std::size_t n, const Stopwatch& clock) {
  Solution<T> s{Vector<T>(n, T(0)), {}};
  s.report.converged = true;
  s.report.residual_history = {0.0};
  s.report.wall_time = clock.elapsed();
  return s;
}

}  // namespace densolve::detail
