// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "densolve/backend.hpp"
#include "densolve/core.hpp"
#include "densolve/detail/iterative.hpp"

namespace densolve {

namespace detail {

template <Real T>
Vector<T> inverse_diagonal(const DenseMatrix<T>& a) {
  Vector<T> d(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a(i, i) == T(0)) throw SingularError("zero diagonal entry in row " + std::to_string(i));
    d[i] = T(1) / a(i, i);
  }
  return d;
}

}  // namespace detail

/// Jacobi iteration x <- x + D^{-1} (b - A x), one gemv per iteration.
template <Real T>
Solution<T> jacobi_solve(const DenseMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                         const SolverConfig& cfg, Backend<T>& be) {
  detail::Stopwatch clock;
  cfg.validate();
  detail::check_system(a, b, x0);
  const auto dinv = detail::inverse_diagonal(a);
  const std::size_t n = a.rows();

  const T bnorm = be.nrm2(b);
  if (bnorm == T(0)) return detail::zero_rhs_solution<T>(n, clock);

  Solution<T> out{Vector<T>(x0.begin(), x0.end()), {}};
  auto& x = out.x;
  auto& rep = out.report;
  Vector<T> r(n), tmp(n);
  T rel = detail::residual<T>(a.view(), x, b, r, tmp, be) / bnorm;
  rep.residual_history.push_back(rel);

  const std::size_t cap = cfg.iteration_cap(n);
  while (!(rel <= cfg.tolerance) && rep.iterations < cap && std::isfinite(rel)) {
    for (std::size_t i = 0; i < n; ++i) x[i] += dinv[i] * r[i];
    rel = detail::residual<T>(a.view(), x, b, r, tmp, be) / bnorm;
    ++rep.iterations;
    rep.residual_history.push_back(rel);
  }
  rep.converged = rel <= cfg.tolerance;
  rep.final_relative_residual = rel;
  rep.wall_time = clock.elapsed();
  return out;
}

/// Forward Gauss-Seidel sweeps (rows 0..n-1, using already updated components).
template <Real T>
Solution<T> gauss_seidel_solve(const DenseMatrix<T>& a, std::span<const T> b,
                               std::span<const T> x0, const SolverConfig& cfg, Backend<T>& be) {
  detail::Stopwatch clock;
  cfg.validate();
  detail::check_system(a, b, x0);
  const auto dinv = detail::inverse_diagonal(a);
  const std::size_t n = a.rows();

  const T bnorm = be.nrm2(b);
  if (bnorm == T(0)) return detail::zero_rhs_solution<T>(n, clock);

  // rows of A as contiguous columns
  const DenseMatrix<T> at = a.transposed();

  Solution<T> out{Vector<T>(x0.begin(), x0.end()), {}};
  auto& x = out.x;
  auto& rep = out.report;
  Vector<T> r(n), tmp(n);
  T rel = detail::residual<T>(a.view(), x, b, r, tmp, be) / bnorm;
  rep.residual_history.push_back(rel);

  const std::size_t cap = cfg.iteration_cap(n);
  while (!(rel <= cfg.tolerance) && rep.iterations < cap && std::isfinite(rel)) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = at.col(i);
      T s = b[i];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s -= row[j] * x[j];
      x[i] = s * dinv[i];
    }
    rel = detail::residual<T>(a.view(), x, b, r, tmp, be) / bnorm;
    ++rep.iterations;
    rep.residual_history.push_back(rel);
  }
  rep.converged = rel <= cfg.tolerance;
  rep.final_relative_residual = rel;
  rep.wall_time = clock.elapsed();
  return out;
}

template <Real T>
Solution<T> jacobi_solve(const DenseMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0,
                         const SolverConfig& cfg, Backend<T>& be) {
  return jacobi_solve<T>(a, std::span<const T>(b), std::span<const T>(x0), cfg, be);
}

template <Real T>
Solution<T> gauss_seidel_solve(const DenseMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0,
                               const SolverConfig& cfg, Backend<T>& be) {
  return gauss_seidel_solve<T>(a, std::span<const T>(b), std::span<const T>(x0), cfg, be);
}

}  // namespace densolve
