// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "densolve/backends.hpp"
#include "densolve/direct.hpp"
#include "densolve/harness/generate.hpp"
#include "test_support.hpp"

namespace densolve {
namespace {

using testing::Rng;

using testing::lu_backward_error;
using testing::well_separated;

template <Real T>
double cholesky_backward_error(const DenseMatrix<T>& a, const CholeskyFactor<T>& f) {
  return testing::cholesky_backward_error(a, f.l);
}

TEST(LuUnblocked, PermutationMatrix) {
  ReferenceBackend<double> be;
  const auto f = lu_factor_unblocked(DenseMatrix<double>::from_rows({{0, 1}, {1, 0}}), be);
  EXPECT_EQ(f.pivots.values(), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(f.lower(), DenseMatrix<double>::identity(2));
  EXPECT_EQ(f.upper(), DenseMatrix<double>::identity(2));
  EXPECT_FALSE(f.singular);
}

TEST(LuUnblocked, TwoByTwoHandExample) {
  ReferenceBackend<double> be;
  const auto a = DenseMatrix<double>::from_rows({{4, 3}, {6, 3}});
  const auto f = lu_factor_unblocked(a, be);
  EXPECT_EQ(f.pivots[0], 1u);
  EXPECT_DOUBLE_EQ(f.lower()(1, 0), 2.0 / 3.0);
  EXPECT_EQ(f.upper()(0, 0), 6.0);
  EXPECT_EQ(f.upper()(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(f.upper()(1, 1), 1.0);
  EXPECT_LE(lu_backward_error(a, f), 1e-16);
}

TEST(LuUnblocked, RandomBackwardError) {
  ReferenceBackend<double> be;
  Rng rng(20);
  for (int t = 0; t < 10; ++t) {
    const auto a = testing::random_matrix<double>(64, 64, rng);
    EXPECT_LE(lu_backward_error(a, lu_factor_unblocked(a, be)),
              10 * 64 * unit_roundoff<double>());
  }
}

TEST(LuUnblocked, ZeroColumnFlagsSingular) {
  ReferenceBackend<double> be;
  const auto a = DenseMatrix<double>::from_rows({{1, 0, 2}, {3, 0, 4}, {5, 0, 6}});
  const auto f = lu_factor_unblocked(a, be);
  EXPECT_TRUE(f.singular);
  ASSERT_TRUE(f.zero_pivot_column.has_value());
  EXPECT_EQ(*f.zero_pivot_column, 1u);
  EXPECT_THROW(lu_solve(f, Vector<double>{1, 1, 1}), SingularError);
}

TEST(LuBlocked, FullWidthBlockIsBitwiseUnblocked) {
  auto be = make_backend<double>("blocked");
  Rng rng(21);
  for (std::size_t n : {5u, 64u, 100u}) {
    const auto a = testing::random_matrix<double>(n, n, rng);
    const auto u = lu_factor_unblocked(a, *be);
    const auto b = lu_factor_blocked(a, n, *be);
    EXPECT_EQ(b.pivots.values(), u.pivots.values());
    EXPECT_EQ(b.packed, u.packed);
  }
}

TEST(LuBlocked, UnitBlockKeepsPivots) {
  ReferenceBackend<double> be;
  Rng rng(22);
  for (int t = 0; t < 10; ++t) {
    const auto a = testing::random_matrix<double>(48, 48, rng);
    EXPECT_EQ(lu_factor_blocked(a, 1, be).pivots.values(),
              lu_factor_unblocked(a, be).pivots.values());
  }
}

TEST(LuBlocked, WellSeparatedFamilyMatchesUnblocked) {
  auto be = make_backend<double>("blocked");
  Rng rng(23);
  const std::size_t n = 128;
  const double u = unit_roundoff<double>();
  for (int t = 0; t < 5; ++t) {
    const auto a = well_separated(n, rng);
    const auto ref = lu_factor_unblocked(a, *be);
    for (std::size_t b : {8u, 32u, 64u}) {
      const auto f = lu_factor_blocked(a, b, *be);
      EXPECT_EQ(f.pivots.values(), ref.pivots.values()) << "b=" << b;
      EXPECT_LE(lu_backward_error(a, f), 10 * n * u);
      EXPECT_LE(testing::frobenius_diff(f.packed, ref.packed), 100 * n * u * frobenius_norm(a));
    }
  }
}

TEST(LuBlocked, BlockLargerThanMatrixIsClamped) {
  ReferenceBackend<double> be;
  Rng rng(24);
  const auto a = testing::random_matrix<double>(10, 10, rng);
  const auto f = lu_factor_blocked(a, 64, be);
  EXPECT_EQ(f.block_size, 10u);
  ASSERT_EQ(f.warnings.size(), 1u);
  EXPECT_NE(f.warnings[0].find("clamped"), std::string::npos);
  EXPECT_THROW(lu_factor_blocked(a, 0, be), std::invalid_argument);
}

TEST(LuBlocked, RejectsNonSquare) {
  ReferenceBackend<double> be;
  EXPECT_THROW(lu_factor_blocked(DenseMatrix<double>(3, 4), 2, be), DimensionError);
}

template <Real T>
class RandomLu : public ::testing::Test {};
using Scalars = ::testing::Types<float, double>;
TYPED_TEST_SUITE(RandomLu, Scalars);

TYPED_TEST(RandomLu, HundredMatricesPerSize) {
  using T = TypeParam;
  auto be = make_backend<T>("blocked");
  Rng rng(25);
  for (std::size_t n : {4u, 16u, 64u, 256u}) {
    const int count = n == 256 ? 20 : 100;
    for (int t = 0; t < count; ++t) {
      const auto a = testing::random_matrix<T>(n, n, rng);
      const auto f = lu_factor_blocked(a, 16, *be);
      ASSERT_LE(lu_backward_error(a, f), 10.0 * n * unit_roundoff<T>()) << "n=" << n;
    }
  }
}

TEST(Cholesky, Identity) {
  ReferenceBackend<double> be;
  EXPECT_EQ(cholesky_factor(DenseMatrix<double>::identity(4), 2, be).l,
            DenseMatrix<double>::identity(4));
}

TEST(Cholesky, TwoByTwoHandExample) {
  ReferenceBackend<double> be;
  const auto a = DenseMatrix<double>::from_rows({{4, 2}, {2, 3}});
  const auto f = cholesky_factor(a, 64, be);
  EXPECT_EQ(f.l(0, 0), 2.0);
  EXPECT_EQ(f.l(1, 0), 1.0);
  EXPECT_EQ(f.l(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.l(1, 1), std::sqrt(2.0));
  EXPECT_LE(cholesky_backward_error(a, f), 1e-15);
}

TEST(Cholesky, Errors) {
  ReferenceBackend<double> be;
  try {
    cholesky_factor(DenseMatrix<double>::from_rows({{1, 0}, {0, -1}}), 64, be);
    FAIL() << "expected NotSpdError";
  } catch (const NotSpdError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(cholesky_factor(DenseMatrix<double>::from_rows({{1, 2}, {0, 1}}), 64, be),
               SymmetryError);
}

TEST(Cholesky, GeneratedSpdResidual) {
  for (const char* name : {"reference", "blocked"}) {
    auto be = make_backend<double>(name);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto p = generate_problem<double>({ProblemKind::spd, 128, seed, Precision::f64});
      for (std::size_t b : {1u, 8u, 64u, 128u}) {
        const auto f = cholesky_factor(p.a, b, *be);
        EXPECT_LE(cholesky_backward_error(p.a, f), 10 * 128 * unit_roundoff<double>());
      }
    }
  }
}

TEST(Substitution, Examples) {
  const auto l = DenseMatrix<double>::from_rows({{1, 0}, {0.5, 1}});
  EXPECT_EQ(forward_substitution(l, Vector<double>{2, 3}, true), (Vector<double>{2, 2}));
  EXPECT_EQ(forward_substitution(DenseMatrix<double>::identity(3), Vector<double>{1, 2, 3}, false),
            (Vector<double>{1, 2, 3}));
  const auto u = DenseMatrix<double>::from_rows({{2, 1}, {0, 4}});
  EXPECT_EQ(backward_substitution(u, Vector<double>{4, 8}), (Vector<double>{1, 2}));
  EXPECT_THROW(backward_substitution(DenseMatrix<double>::from_rows({{1, 1}, {0, 0}}),
                                     Vector<double>{1, 1}),
               SingularError);
  EXPECT_THROW(forward_substitution(DenseMatrix<double>(2, 2), Vector<double>{1, 1}, false),
               SingularError);
}

TEST(Substitution, RandomResidual) {
  Rng rng(26);
  const std::size_t n = 64;
  auto l = testing::random_matrix<double>(n, n, rng);
  auto u = testing::random_matrix<double>(n, n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    l(i, i) = 1.0;
    u(i, i) = 4.0 + std::abs(u(i, i)) * n;  // keeps U well conditioned
  }
  const auto b = testing::random_vector<double>(n, rng);
  const auto y = forward_substitution(l, std::span<const double>(b), true);
  DenseMatrix<double> lt(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) lt(i, j) = l(i, j);
  auto ly = testing::naive_matvec(lt, y);
  double rn = 0, bn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rn += (ly[i] - b[i]) * (ly[i] - b[i]);
    bn += b[i] * b[i];
  }
  // unit-lower with random entries can amplify; bound relative to |L||y|
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j <= i; ++j) s += std::abs(lt(i, j) * y[j]);
    scale = std::max(scale, s);
  }
  EXPECT_LE(std::sqrt(rn), 10 * n * unit_roundoff<double>() * scale * std::sqrt(double(n)));

  DenseMatrix<double> ut(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) ut(i, j) = u(i, j);
  const auto x = backward_substitution(u, std::span<const double>(b));
  EXPECT_LE(relative_residual(ut, x, b), 10 * n * unit_roundoff<double>());
}

TEST(LuSolve, Examples) {
  ReferenceBackend<double> be;
  EXPECT_EQ(lu_solve(lu_factor_unblocked(DenseMatrix<double>::identity(3), be),
                     Vector<double>{1, 2, 3}),
            (Vector<double>{1, 2, 3}));
  EXPECT_EQ(lu_solve(lu_factor_unblocked(DenseMatrix<double>::from_rows({{0, 1}, {1, 0}}), be),
                     Vector<double>{5, 7}),
            (Vector<double>{7, 5}));
  const auto f = lu_factor_unblocked(DenseMatrix<double>::identity(3), be);
  EXPECT_THROW(lu_solve(f, Vector<double>{1, 2}), DimensionError);
}

TEST(LuSolve, RandomResidualAndOracle) {
  auto be = make_backend<double>("blocked");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p =
        generate_problem<double>({ProblemKind::general_nonsymmetric, 256, seed, Precision::f64});
    const auto f = lu_factor_blocked(p.a, 64, *be);
    const auto x = lu_solve(f, p.b);
    EXPECT_LE(relative_residual(p.a, x, p.b), 1e-10);
    EXPECT_LE(testing::inf_norm_rel_diff(x, testing::oracle_solve(p.a, p.b)), 1e-10);
  }
  Rng rng(27);
  const auto a = testing::random_matrix<double>(256, 256, rng);
  const auto b = testing::random_vector<double>(256, rng);
  EXPECT_LE(relative_residual(a, lu_solve(lu_factor_blocked(a, 32, *be), b), b), 1e-10);
}

TEST(LuSolve, MultipleRightHandSides) {
  ReferenceBackend<double> be;
  Rng rng(28);
  const auto a = testing::random_matrix<double>(20, 20, rng);
  const auto b = testing::random_matrix<double>(20, 3, rng);
  const auto f = lu_factor_unblocked(a, be);
  const auto x = lu_solve(f, b, be);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto col = b.col(j);
    const Vector<double> bj(col.begin(), col.end());
    const auto xj = lu_solve(f, bj);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(x(i, j), xj[i], 1e-12);
  }
}

TEST(CholeskySolve, Examples) {
  ReferenceBackend<double> be;
  EXPECT_EQ(cholesky_solve(cholesky_factor(DenseMatrix<double>::identity(2), 1, be),
                           Vector<double>{3, 4}),
            (Vector<double>{3, 4}));
  const auto a = DenseMatrix<double>::from_rows({{4, 2}, {2, 3}});
  const auto x = cholesky_solve(cholesky_factor(a, 2, be), Vector<double>{6, 5});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(CholeskySolve, GeneratedSpd) {
  auto be = make_backend<double>("blocked");
  const auto p = generate_problem<double>({ProblemKind::spd, 256, 3, Precision::f64});
  const auto x = cholesky_solve(cholesky_factor(p.a, 64, *be), p.b);
  EXPECT_LE(relative_residual(p.a, x, p.b), 1e-10);
}

TEST(Determinant, MatchesCofactorExpansion) {
  ReferenceBackend<double> be;
  Rng rng(29);
  for (int t = 0; t < 50; ++t) {
    const auto a = testing::random_matrix<double>(5, 5, rng);
    std::vector<std::vector<double>> rows(5, std::vector<double>(5));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) rows[i][j] = a(i, j);
    const double ref = testing::cofactor_determinant(rows);
    EXPECT_LE(std::abs(determinant(lu_factor_unblocked(a, be)) - ref), 1e-8 * std::abs(ref));
  }
  EXPECT_EQ(determinant(lu_factor_unblocked(DenseMatrix<double>::from_rows({{0, 1}, {1, 0}}), be)),
            -1.0);
}

TEST(LuCounters, MultiplyAddsFollowTheCubicLaw) {
  ReferenceBackend<double> be;
  Rng rng(30);
  const std::size_t n = 256;
  const auto a = testing::random_matrix<double>(n, n, rng);
  be.reset_counters();
  lu_factor_unblocked(a, be);
  const auto& c = be.counters();
  // scal multiplies count once, ger multiply-adds twice
  const double flops = 2.0 * double(c.ger.madds) + double(c.scal.madds);
  EXPECT_NEAR(flops / (2.0 / 3.0 * n * n * n), 1.0, 0.05);
  EXPECT_EQ(c.iamax.calls, n);
  EXPECT_EQ(c.gemm.calls, 0u);

  be.reset_counters();
  lu_factor_blocked(a, 64, be);
  EXPECT_EQ(c.gemm.calls, 3u);
  EXPECT_EQ(c.trsm.calls, 3u);
}

}  // namespace
}  // namespace densolve
