// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "densolve/core.hpp"

namespace densolve {

enum class ProblemKind { identity, diag_dominant, spd, general_nonsymmetric, from_file };

inline std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::identity: return "identity";
    case ProblemKind::diag_dominant: return "diag_dominant";
    case ProblemKind::spd: return "spd";
    case ProblemKind::general_nonsymmetric: return "general_nonsymmetric";
    case ProblemKind::from_file: return "from_file";
  }
  return "unknown";
}

struct ProblemSpec {
  ProblemKind kind = ProblemKind::diag_dominant;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Precision precision = Precision::f64;
};

/// A x_true = b up to rounding of the product.
template <Real T>
struct Problem {
  DenseMatrix<T> a;
  Vector<T> b;
  Vector<T> x_true;
};

namespace detail {

// Entries are drawn in binary64 and rounded once, so both precisions see the
// same underlying system.
class UniformSource {
public:
  UniformSource(std::uint64_t seed, ProblemKind kind)
      : engine_(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(kind) + 1) {}

  double operator()(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

private:
  std::mt19937_64 engine_;
};

template <Real T>
Vector<T> multiply(const DenseMatrix<T>& a, const Vector<T>& x) {
  Vector<T> y(a.rows(), T(0));
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto col = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += col[i] * x[j];
  }
  return y;
}

// Off-diagonals in [-1, 1] (plus an optional antisymmetric perturbation),
// diagonal four times the off-diagonal row sum.
inline std::vector<double> dominant_entries(std::size_t n, UniformSource& rng, bool skew) {
  std::vector<double> a(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) a[i + j * n] = rng();
  if (skew) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) {
        const double s = rng(-0.5, 0.5);
        a[i + j * n] += s;
        a[j + i * n] -= s;
      }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sum += std::abs(a[i + j * n]);
    a[i + i * n] = n == 1 ? 1.0 : 4.0 * sum;
  }
  return a;
}

// M^T M + n I, assembled from column dot products of M and mirrored exactly.
inline std::vector<double> spd_entries(std::size_t n, UniformSource& rng) {
  std::vector<double> m(n * n);
  for (double& v : m) v = rng();
  std::vector<double> a(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double* mj = m.data() + j * n;
    for (std::size_t i = j; i < n; ++i) {
      const double* mi = m.data() + i * n;
      double s = 0;
      for (std::size_t p = 0; p < n; ++p) s += mi[p] * mj[p];
      if (i == j) s += double(n);
      a[i + j * n] = s;
      a[j + i * n] = s;
    }
  }
  return a;
}

}  // namespace detail

/// Builds A x_true = b with x_true uniform in [-1, 1]. Deterministic in the spec.
template <Real T>
Problem<T> make_problem(DenseMatrix<T> a, std::uint64_t seed) {
  detail::require_dims(a.square(), "problem matrix must be square");
  detail::UniformSource rng(seed, ProblemKind::from_file);
  Problem<T> p;
  p.x_true.resize(a.rows());
  for (T& v : p.x_true) v = static_cast<T>(rng());
  p.b = detail::multiply(a, p.x_true);
  p.a = std::move(a);
  return p;
}

/// Generates a system solvable by construction:
///   identity              A = I, b = x_true
///   diag_dominant         strictly row diagonally dominant, factor 4
///   spd                   M^T M + n I, M uniform in [-1, 1]
///   general_nonsymmetric  diag_dominant plus an antisymmetric perturbation
template <Real T>
Problem<T> generate_problem(const ProblemSpec& spec) {
  if (spec.precision != precision_of<T>())
    throw std::invalid_argument("problem precision does not match the scalar type");
  if (spec.n == 0) throw std::invalid_argument("problem size must be at least 1");
  const std::size_t n = spec.n;
  detail::UniformSource rng(spec.seed, spec.kind);

  std::vector<double> entries;
  switch (spec.kind) {
    case ProblemKind::identity:
      entries.assign(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) entries[i + i * n] = 1.0;
      break;
    case ProblemKind::diag_dominant:
      entries = detail::dominant_entries(n, rng, false);
      break;
    case ProblemKind::general_nonsymmetric:
      entries = detail::dominant_entries(n, rng, true);
      break;
    case ProblemKind::spd:
      entries = detail::spd_entries(n, rng);
      break;
    case ProblemKind::from_file:
      throw std::invalid_argument("from_file problems are built with make_problem");
  }

  Problem<T> p;
  p.a = DenseMatrix<T>(n, n, std::vector<T>(entries.begin(), entries.end()));
  p.x_true.resize(n);
  for (T& v : p.x_true) v = static_cast<T>(rng());
  p.b = spec.kind == ProblemKind::identity ? p.x_true : detail::multiply(p.a, p.x_true);
  return p;
}

}  // namespace densolve
