// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "densolve/backend.hpp"
#include "densolve/core.hpp"
#include "densolve/detail/iterative.hpp"

namespace densolve {

/// Conjugate gradients for symmetric positive definite A.
///
/// One gemv per iteration. Convergence claimed by the recursive residual is
/// confirmed against the true residual before returning; if the two disagree
/// the iteration continues from the true residual. Throws NotSpdError when a
/// direction with nonpositive curvature p^T A p is met.
template <Real T>
Solution<T> cg_solve(const DenseMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                     const SolverConfig& cfg, Backend<T>& be) {
  detail::Stopwatch clock;
  cfg.validate();
  detail::check_system(a, b, x0);
  detail::require_symmetric(a);
  const std::size_t n = a.rows();
  const auto av = a.view();

  const T bnorm = be.nrm2(b);
  if (bnorm == T(0)) return detail::zero_rhs_solution<T>(n, clock);

  Solution<T> out{Vector<T>(x0.begin(), x0.end()), {}};
  auto& x = out.x;
  auto& rep = out.report;
  Vector<T> r(n), p(n), q(n);
  T rel = detail::residual<T>(av, x, b, r, q, be) / bnorm;
  rep.residual_history.push_back(rel);
  bool verified = true;  // rel currently holds a true residual

  p = r;
  T rr = be.dot(r, r);
  const std::size_t cap = cfg.iteration_cap(n);
  while (rep.iterations < cap && std::isfinite(rel)) {
    if (rel <= cfg.tolerance) {
      if (verified) break;
      rel = detail::residual<T>(av, x, b, r, q, be) / bnorm;
      verified = true;
      if (rel <= cfg.tolerance) break;
      // recursive residual drifted; restart directions from the true one
      p = r;
      rr = be.dot(r, r);
    }
    be.gemv(av, p, q);
    const T pq = be.dot(p, q);
    if (!(pq > T(0)))
      throw NotSpdError("cg: nonpositive curvature p^T A p", rep.iterations);
    const T alpha = rr / pq;
    be.axpy(alpha, p, x);
    be.axpy(-alpha, q, r);
    const T rr_next = be.dot(r, r);
    rel = std::sqrt(rr_next) / bnorm;
    verified = false;
    ++rep.iterations;
    rep.residual_history.push_back(rel);

    const T beta = rr_next / rr;
    rr = rr_next;
    be.scal(beta, p);
    be.axpy(T(1), r, p);
  }
  if (!verified) rel = detail::residual<T>(av, x, b, r, q, be) / bnorm;
  rep.converged = rel <= cfg.tolerance;
  rep.final_relative_residual = rel;
  rep.wall_time = clock.elapsed();
  return out;
}

/// Arnoldi basis and Givens-rotated least-squares state of one GMRES cycle.
///
/// Holds the orthonormal basis V (n x (m+1)), the unrotated Hessenberg
/// matrix H ((m+1) x m) with A V(:, :k) = V(:, :k+1) H(:k+1, :k), its
/// triangularized copy R, and the rotated right-hand side g of
/// min || beta e_1 - H y ||. |g(k)| is the least-squares residual after k steps.
template <Real T>
class ArnoldiWorkspace {
public:
  ArnoldiWorkspace(std::size_t n, std::size_t m,
                   Orthogonalization orth = Orthogonalization::modified)
      : v_(n, m + 1), h_(m + 1, m), r_(m + 1, m), g_(m + 1), cs_(m), sn_(m), orth_(orth) {}

  std::size_t capacity() const noexcept { return h_.cols(); }
  /// Steps taken since `start`.
  std::size_t size() const noexcept { return k_; }
  bool happy() const noexcept { return happy_; }
  T beta() const noexcept { return beta_; }
  T ls_residual() const noexcept { return std::abs(g_[k_]); }

  const DenseMatrix<T>& basis() const noexcept { return v_; }
  const DenseMatrix<T>& hessenberg() const noexcept { return h_; }
  std::span<const T> rotated_rhs() const noexcept { return g_; }

  /// Begins a cycle from residual r with norm `rnorm` > 0.
  void start(std::span<const T> r, T rnorm, Backend<T>& be) {
    k_ = 0;
    happy_ = false;
    beta_ = rnorm;
    std::copy(r.begin(), r.end(), v_.col(0).begin());
    be.scal(T(1) / rnorm, v_.col(0));
    std::fill(g_.begin(), g_.end(), T(0));
    g_[0] = rnorm;
  }

  /// One Arnoldi step with Gram-Schmidt, then one new Givens rotation.
  /// Returns h(k+1, k).
  T step(ConstMatrixView<T> a, Backend<T>& be) {
    const std::size_t k = k_;
    detail::require_dims(k < capacity() && !happy_, "arnoldi: no room for another step");
    const auto vk = std::span<const T>(v_.col(k));
    auto w = v_.col(k + 1);
    be.gemv(a, vk, w);

    T hsq = 0;
    if (orth_ == Orthogonalization::classical) {
      for (std::size_t j = 0; j <= k; ++j) h_(j, k) = be.dot(w, v_.col(j));
      for (std::size_t j = 0; j <= k; ++j) be.axpy(-h_(j, k), v_.col(j), w);
    } else {
      for (std::size_t j = 0; j <= k; ++j) {
        h_(j, k) = be.dot(w, v_.col(j));
        be.axpy(-h_(j, k), v_.col(j), w);
      }
    }
    for (std::size_t j = 0; j <= k; ++j) hsq += h_(j, k) * h_(j, k);
    const T hnext = be.nrm2(w);
    h_(k + 1, k) = hnext;

    // ||A v_k||^2 = sum h(j,k)^2 + h(k+1,k)^2 in exact arithmetic
    const T avnorm = std::sqrt(hsq + hnext * hnext);
    if (hnext <= unit_roundoff<T>() * avnorm) {
      happy_ = true;
    } else {
      be.scal(T(1) / hnext, w);
    }

    for (std::size_t i = 0; i <= k + 1; ++i) r_(i, k) = h_(i, k);
    if (happy_) r_(k + 1, k) = T(0);
    for (std::size_t j = 0; j < k; ++j) {
      const T x = r_(j, k), y = r_(j + 1, k);
      r_(j, k) = cs_[j] * x + sn_[j] * y;
      r_(j + 1, k) = -sn_[j] * x + cs_[j] * y;
    }
    const T x = r_(k, k), y = r_(k + 1, k);
    const T den = std::hypot(x, y);
    if (den == T(0)) {
      cs_[k] = T(1);
      sn_[k] = T(0);
    } else {
      cs_[k] = x / den;
      sn_[k] = y / den;
    }
    r_(k, k) = den;
    r_(k + 1, k) = T(0);
    g_[k + 1] = -sn_[k] * g_[k];
    g_[k] = cs_[k] * g_[k];
    ++k_;
    return hnext;
  }

  /// x <- x + V(:, :k) y where R(:k, :k) y = g(:k).
  void update_solution(std::span<T> x, Backend<T>& be) const {
    const std::size_t k = k_;
    if (k == 0) return;
    Vector<T> y(g_.begin(), g_.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = k; i-- > 0;) {
      if (r_(i, i) == T(0)) throw SingularError("gmres: singular projected system");
      y[i] /= r_(i, i);
      for (std::size_t j = 0; j < i; ++j) y[j] -= r_(j, i) * y[i];
    }
    Vector<T> dx(x.size());
    be.gemv(v_.view().block(0, 0, v_.rows(), k), y, dx);
    be.axpy(T(1), dx, x);
  }

private:
  DenseMatrix<T> v_;
  DenseMatrix<T> h_;
  DenseMatrix<T> r_;
  Vector<T> g_;
  Vector<T> cs_, sn_;
  Orthogonalization orth_;
  std::size_t k_ = 0;
  bool happy_ = false;
  T beta_ = 0;
};

/// Restarted GMRES(m).
///
/// `report.iterations` counts inner Arnoldi steps across all cycles and
/// `report.cycle_starts` records the iteration count at each restart.
/// History entries after the first are least-squares residual estimates;
/// `final_relative_residual` is always a true residual.
template <Real T>
Solution<T> gmres_solve(const DenseMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                        const SolverConfig& cfg, Backend<T>& be) {
  detail::Stopwatch clock;
  cfg.validate();
  detail::check_system(a, b, x0);
  const std::size_t n = a.rows();
  const auto av = a.view();

  const T bnorm = be.nrm2(b);
  if (bnorm == T(0)) return detail::zero_rhs_solution<T>(n, clock);

  Solution<T> out{Vector<T>(x0.begin(), x0.end()), {}};
  auto& x = out.x;
  auto& rep = out.report;
  Vector<T> r(n), tmp(n);
  T rnorm = detail::residual<T>(av, x, b, r, tmp, be);
  T rel = rnorm / bnorm;
  rep.residual_history.push_back(rel);

  const std::size_t m = std::min(cfg.restart_m, n);
  ArnoldiWorkspace<T> ws(n, m, cfg.orthogonalization);
  const std::size_t cap = cfg.iteration_cap(n);
  while (!(rel <= cfg.tolerance) && rep.iterations < cap && std::isfinite(rel)) {
    rep.cycle_starts.push_back(rep.iterations);
    const T cycle_start = rel;
    ws.start(r, rnorm, be);
    while (ws.size() < m && rep.iterations < cap) {
      ws.step(av, be);
      ++rep.iterations;
      const double est = ws.ls_residual() / bnorm;
      rep.residual_history.push_back(est);
      if (ws.happy() || est <= cfg.tolerance) break;
    }
    ws.update_solution(x, be);
    rnorm = detail::residual<T>(av, x, b, r, tmp, be);
    rel = rnorm / bnorm;
    if (rel <= cfg.tolerance) {
      if (ws.happy()) rep.breakdown = Breakdown::happy_breakdown;
      break;
    }
    if (rel >= cycle_start * (T(1) - unit_roundoff<T>())) {
      rep.breakdown = Breakdown::stagnation;
      break;
    }
  }
  rep.converged = rel <= cfg.tolerance;
  rep.final_relative_residual = rel;
  rep.wall_time = clock.elapsed();
  return out;
}

/// BiCGSTAB with shadow residual r0hat = r(0).
///
/// A full iteration costs exactly 6 axpy, 4 dot and 2 gemv calls, plus one
/// scal for the direction update and nrm2 calls for the convergence checks.
/// Breakdowns return the last iterate with `report.breakdown` set.
template <Real T>
Solution<T> bicgstab_solve(const DenseMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                           const SolverConfig& cfg, Backend<T>& be) {
  detail::Stopwatch clock;
  cfg.validate();
  detail::check_system(a, b, x0);
  const std::size_t n = a.rows();
  const auto av = a.view();
  constexpr T eps = std::numeric_limits<T>::epsilon();

  const T bnorm = be.nrm2(b);
  if (bnorm == T(0)) return detail::zero_rhs_solution<T>(n, clock);

  Solution<T> out{Vector<T>(x0.begin(), x0.end()), {}};
  auto& x = out.x;
  auto& rep = out.report;
  Vector<T> r(n), r0hat(n), p(n), v(n), s(n), t(n);
  T rnorm = detail::residual<T>(av, x, b, r, t, be);
  T rel = rnorm / bnorm;
  rep.residual_history.push_back(rel);

  const std::size_t cap = cfg.iteration_cap(n);
  while (!(rel <= cfg.tolerance) && rep.iterations < cap && std::isfinite(rel)) {
    // (re)start from the current residual
    r0hat = r;
    const T r0norm = rnorm;
    T rho_prev = 1, rho = be.dot(r0hat, r), alpha = 1, omega = 1;
    std::fill(p.begin(), p.end(), T(0));
    std::fill(v.begin(), v.end(), T(0));
    bool claimed = false;

    while (rep.iterations < cap) {
      if (std::abs(rho) < eps * r0norm * rnorm) {
        rep.breakdown = Breakdown::rho_breakdown;
        break;
      }
      const T beta = (rho / rho_prev) * (alpha / omega);
      // p = r + beta (p - omega v)
      be.axpy(-omega, v, p);
      be.scal(beta, p);
      be.axpy(T(1), r, p);
      be.gemv(av, p, v);
      const T r0v = be.dot(r0hat, v);
      if (r0v == T(0)) {
        rep.breakdown = Breakdown::rho_breakdown;
        break;
      }
      alpha = rho / r0v;
      s = r;
      be.axpy(-alpha, v, s);

      const T snorm = be.nrm2(s);
      if (snorm / bnorm <= cfg.tolerance) {
        be.axpy(alpha, p, x);
        ++rep.iterations;
        rnorm = snorm;
        rel = snorm / bnorm;
        rep.residual_history.push_back(rel);
        claimed = true;
        break;
      }

      be.gemv(av, s, t);
      const T tt = be.dot(t, t);
      const T ts = be.dot(t, s);
      if (tt == T(0)) {
        rep.breakdown = Breakdown::omega_breakdown;
        break;
      }
      omega = ts / tt;
      be.axpy(alpha, p, x);
      be.axpy(omega, s, x);
      r = s;
      be.axpy(-omega, t, r);
      rho_prev = rho;
      rho = be.dot(r0hat, r);

      rnorm = be.nrm2(r);
      rel = rnorm / bnorm;
      ++rep.iterations;
      rep.residual_history.push_back(rel);
      if (rel <= cfg.tolerance) {
        claimed = true;
        break;
      }
      if (!std::isfinite(rel)) break;
      if (std::abs(omega) < eps) {
        rep.breakdown = Breakdown::omega_breakdown;
        break;
      }
    }
    // verify the recursive residual; restart if it drifted
    rnorm = detail::residual<T>(av, x, b, r, t, be);
    rel = rnorm / bnorm;
    if (!claimed || rep.breakdown) break;
  }
  rep.converged = rel <= cfg.tolerance;
  if (rep.converged) rep.breakdown.reset();
  rep.final_relative_residual = rel;
  rep.wall_time = clock.elapsed();
  return out;
}

template <Real T>
Solution<T> cg_solve(const DenseMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0,
                     const SolverConfig& cfg, Backend<T>& be) {
  return cg_solve<T>(a, std::span<const T>(b), std::span<const T>(x0), cfg, be);
}

template <Real T>
Solution<T> gmres_solve(const DenseMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0,
                        const SolverConfig& cfg, Backend<T>& be) {
  return gmres_solve<T>(a, std::span<const T>(b), std::span<const T>(x0), cfg, be);
}

template <Real T>
Solution<T> bicgstab_solve(const DenseMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0,
                           const SolverConfig& cfg, Backend<T>& be) {
  return bicgstab_solve<T>(a, std::span<const T>(b), std::span<const T>(x0), cfg, be);
}

}  // namespace densolve
