// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "densolve/backend.hpp"
#include "densolve/core.hpp"
#include "densolve/detail/iterative.hpp"
#include "densolve/direct.hpp"
#include "densolve/harness/generate.hpp"
#include "densolve/krylov.hpp"
#include "densolve/stationary.hpp"

namespace densolve {

enum class Method { jacobi, gauss_seidel, cg, gmres, bicgstab, lu, lu_blocked, cholesky };

inline constexpr std::array<Method, 8> kAllMethods = {
    Method::jacobi, Method::gauss_seidel, Method::cg,         Method::gmres,
    Method::bicgstab, Method::lu,         Method::lu_blocked, Method::cholesky};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::jacobi: return "jacobi";
    case Method::gauss_seidel: return "gauss-seidel";
    case Method::cg: return "cg";
    case Method::gmres: return "gmres";
    case Method::bicgstab: return "bicgstab";
    case Method::lu: return "lu";
    case Method::lu_blocked: return "lu-blocked";
    case Method::cholesky: return "cholesky";
  }
  return "unknown";
}

inline Method parse_method(std::string_view s) {
  for (Method m : kAllMethods)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

inline bool is_iterative(Method m) {
  return m != Method::lu && m != Method::lu_blocked && m != Method::cholesky;
}

/// Column heading used in speedup tables.
inline std::string display_name(Method m, std::size_t restart = 35) {
  switch (m) {
    case Method::jacobi: return "Jacobi";
    case Method::gauss_seidel: return "Gauss-Seidel";
    case Method::cg: return "CG";
    case Method::gmres: return "GMRES(" + std::to_string(restart) + ")";
    case Method::bicgstab: return "BiCGSTAB";
    case Method::lu: return "LU";
    case Method::lu_blocked: return "Blocked LU";
    case Method::cholesky: return "Cholesky";
  }
  return "?";
}

/// Problem family each method is benchmarked on.
inline ProblemKind default_kind(Method m) {
  switch (m) {
    case Method::cg:
    case Method::cholesky: return ProblemKind::spd;
    case Method::jacobi:
    case Method::gauss_seidel: return ProblemKind::diag_dominant;
    default: return ProblemKind::general_nonsymmetric;
  }
}

template <Real T>
struct MethodOutcome {
  Vector<T> x;
  SolveReport report;
  /// Message of the library error that ended the solve, if any.
  std::string error;
};

/// Runs one method from a zero initial guess. Library errors become a
/// non-converged outcome instead of propagating.
template <Real T>
MethodOutcome<T> run_method(Method m, const DenseMatrix<T>& a, const Vector<T>& b,
                            const SolverConfig& cfg, Backend<T>& be) {
  MethodOutcome<T> out;
  const Vector<T> x0(b.size(), T(0));
  detail::Stopwatch clock;
  be.stage_in(a.data());
  be.stage_in(std::span<const T>(b));
  try {
    Solution<T> s;
    switch (m) {
      case Method::jacobi: s = jacobi_solve<T>(a, b, x0, cfg, be); break;
      case Method::gauss_seidel: s = gauss_seidel_solve<T>(a, b, x0, cfg, be); break;
      case Method::cg: s = cg_solve<T>(a, b, x0, cfg, be); break;
      case Method::gmres: s = gmres_solve<T>(a, b, x0, cfg, be); break;
      case Method::bicgstab: s = bicgstab_solve<T>(a, b, x0, cfg, be); break;
      case Method::lu:
      case Method::lu_blocked: {
        const auto f = m == Method::lu ? lu_factor_unblocked<T>(a, be)
                                       : lu_factor_blocked<T>(a, cfg.block_size_b, be);
        if (f.singular)
          throw SingularError("zero pivot in column " + std::to_string(*f.zero_pivot_column));
        s.x = lu_solve<T>(f, b);
        break;
      }
      case Method::cholesky: {
        const auto f = cholesky_factor<T>(a, cfg.block_size_b, be);
        s.x = cholesky_solve<T>(f, b);
        break;
      }
    }
    out.x = std::move(s.x);
    out.report = std::move(s.report);
    if (!is_iterative(m)) {
      const bool zero_rhs = std::all_of(b.begin(), b.end(), [](T v) { return v == T(0); });
      const double rel = zero_rhs ? 0.0 : double(relative_residual<T>(a, out.x, b));
      out.report.final_relative_residual = rel;
      out.report.residual_history = {rel};
      out.report.converged = std::isfinite(rel);
    }
  } catch (const SingularError& e) {
    out.error = e.what();
    out.report.converged = false;
    out.report.breakdown = Breakdown::zero_pivot;
  } catch (const NotSpdError& e) {
    out.error = e.what();
    out.report.converged = false;
    out.report.breakdown = Breakdown::nonpositive_pivot;
  } catch (const Error& e) {
    out.error = e.what();
    out.report.converged = false;
  }
  if (!out.x.empty()) be.stage_out(std::span<T>(out.x));
  out.report.wall_time = clock.elapsed();
  return out;
}

}  // namespace densolve
