// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include <gtest/gtest.h>

#include "densolve/backends.hpp"
#include "test_support.hpp"

namespace densolve {
namespace {

using testing::Rng;

class BackendTest : public ::testing::TestWithParam<std::string> {
protected:
  std::unique_ptr<Backend<double>> be = make_backend<double>(GetParam());
};

TEST_P(BackendTest, AxpyExamples) {
  Vector<double> y{1, 2};
  be->axpy(0.0, Vector<double>{5, 7}, y);
  EXPECT_EQ(y, (Vector<double>{1, 2}));
  Vector<double> z{0, 0};
  be->axpy(2.0, Vector<double>{1, 1}, z);
  EXPECT_EQ(z, (Vector<double>{2, 2}));
  EXPECT_THROW(be->axpy(1.0, Vector<double>{1}, z), DimensionError);
}

TEST_P(BackendTest, AxpyMatchesLoop) {
  Rng rng(1);
  const auto x = testing::random_vector<double>(100, rng);
  auto y = testing::random_vector<double>(100, rng);
  auto expect = y;
  for (std::size_t i = 0; i < 100; ++i) expect[i] += 0.37 * x[i];
  be->axpy(0.37, x, y);
  EXPECT_EQ(y, expect);
}

TEST_P(BackendTest, DotExamples) {
  EXPECT_EQ(be->dot(Vector<double>{1, 2, 3}, Vector<double>{4, 5, 6}), 32.0);
  EXPECT_EQ(be->dot(Vector<double>{0, 0}, Vector<double>{0, 0}), 0.0);
  EXPECT_GT(be->dot(Vector<double>{0, 1e-3}, Vector<double>{0, 1e-3}), 0.0);
  EXPECT_THROW(be->dot(Vector<double>{1}, Vector<double>{1, 2}), DimensionError);
}

TEST_P(BackendTest, DotMatchesKahanOracle) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto x = testing::random_vector<double>(1000, rng);
    const auto y = testing::random_vector<double>(1000, rng);
    const double ref = testing::kahan_dot(x, y);
    double abs_sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) abs_sum += std::abs(x[i] * y[i]);
    // relative to sum |x_i y_i| so cancellation does not inflate the measure
    EXPECT_LE(std::abs(be->dot(x, y) - ref), 1e-12 * abs_sum);
  }
}

TEST_P(BackendTest, Nrm2) {
  EXPECT_EQ(be->nrm2(Vector<double>{3, 4}), 5.0);
  EXPECT_EQ(be->nrm2(Vector<double>{0, 0, 0}), 0.0);
  const double big = be->nrm2(Vector<double>{1e300, 1e300});
  // scaled two-pass oracle: max * sqrt(sum (x/max)^2)
  EXPECT_NEAR(big / 1e300, std::sqrt(2.0), 1e-15);
  const double tiny = be->nrm2(Vector<double>{3e-300, 4e-300});
  EXPECT_NEAR(tiny / 1e-300, 5.0, 1e-14);
}

TEST_P(BackendTest, ScalExamples) {
  Rng rng(3);
  auto x = testing::random_vector<double>(50, rng);
  const auto orig = x;
  be->scal(1.0, x);
  EXPECT_EQ(x, orig);
  be->scal(-2.5, x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i], -2.5 * orig[i]);
  be->scal(0.0, x);
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST_P(BackendTest, IamaxFirstWins) {
  EXPECT_EQ(be->iamax(Vector<double>{1, -3, 2}), 1u);
  EXPECT_EQ(be->iamax(Vector<double>{2, -2}), 0u);
  EXPECT_THROW(be->iamax(Vector<double>{}), DimensionError);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto x = testing::random_vector<double>(64, rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
      if (std::abs(x[i]) > std::abs(x[best])) best = i;
    EXPECT_EQ(be->iamax(x), best);
  }
}

TEST_P(BackendTest, GemvExamples) {
  Vector<double> y(2);
  be->gemv(DenseMatrix<double>::identity(2).view(), Vector<double>{5, 6}, y);
  EXPECT_EQ(y, (Vector<double>{5, 6}));
  const auto a = DenseMatrix<double>::from_rows({{1, 2}, {3, 4}});
  be->gemv(a.view(), Vector<double>{1, 1}, y);
  EXPECT_EQ(y, (Vector<double>{3, 7}));
  Vector<double> wrong(3);
  EXPECT_THROW(be->gemv(a.view(), Vector<double>{1, 1}, wrong), DimensionError);
}

TEST_P(BackendTest, GemvMatchesNaiveLoop) {
  Rng rng(5);
  const auto a = testing::random_matrix<double>(32, 32, rng);
  const auto x = testing::random_vector<double>(32, rng);
  Vector<double> y(32);
  be->gemv(a.view(), x, y);
  const auto ref = testing::naive_matvec(a, x);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(y[i], ref[i], 32 * 10 * 1.2e-16 * 32);
}

TEST_P(BackendTest, GerExamples) {
  DenseMatrix<double> a(2, 2);
  be->ger(0.0, Vector<double>{1, 2}, Vector<double>{3, 4}, a.view());
  EXPECT_EQ(a, DenseMatrix<double>(2, 2));
  be->ger(1.0, Vector<double>{1, 2}, Vector<double>{3, 4}, a.view());
  EXPECT_EQ(a, DenseMatrix<double>::from_rows({{3, 4}, {6, 8}}));
  EXPECT_THROW(be->ger(1.0, Vector<double>{1}, Vector<double>{3, 4}, a.view()), DimensionError);
}

TEST_P(BackendTest, GerMatchesLoop) {
  Rng rng(6);
  auto a = testing::random_matrix<double>(17, 9, rng);
  const auto x = testing::random_vector<double>(17, rng);
  const auto y = testing::random_vector<double>(9, rng);
  auto expect = a;
  for (std::size_t j = 0; j < 9; ++j)
    for (std::size_t i = 0; i < 17; ++i) expect(i, j) += x[i] * (-1.5 * y[j]);
  be->ger(-1.5, x, y, a.view());
  EXPECT_EQ(a, expect);
}

TEST_P(BackendTest, GemmExamples) {
  Rng rng(7);
  const auto b = testing::random_matrix<double>(5, 3, rng);
  DenseMatrix<double> c(5, 3, std::nan(""));  // beta = 0 must ignore C
  be->gemm(1.0, DenseMatrix<double>::identity(5).view(), b.view(), 0.0, c.view());
  EXPECT_EQ(c, b);
  auto c2 = testing::random_matrix<double>(5, 3, rng);
  const auto c2_orig = c2;
  be->gemm(0.0, testing::random_matrix<double>(5, 4, rng).view(),
           testing::random_matrix<double>(4, 3, rng).view(), 1.0, c2.view());
  EXPECT_EQ(c2, c2_orig);
  EXPECT_THROW(be->gemm(1.0, b.view(), b.view(), 0.0, c.view()), DimensionError);
}

// |C - C_ref|_ij <= c * k * eps * (|A| |B|)_ij
void expect_gemm_close(const DenseMatrix<double>& c, const DenseMatrix<double>& ref,
                       const DenseMatrix<double>& a, const DenseMatrix<double>& b, double factor) {
  const double eps = unit_roundoff<double>();
  for (std::size_t j = 0; j < c.cols(); ++j)
    for (std::size_t i = 0; i < c.rows(); ++i) {
      double bound = 0;
      for (std::size_t p = 0; p < a.cols(); ++p) bound += std::abs(a(i, p) * b(p, j));
      ASSERT_LE(std::abs(c(i, j) - ref(i, j)), factor * double(a.cols()) * eps * bound)
          << "at (" << i << ", " << j << ")";
    }
}

TEST_P(BackendTest, GemmMatchesNaiveLoop) {
  Rng rng(8);
  const auto a = testing::random_matrix<double>(64, 64, rng);
  const auto b = testing::random_matrix<double>(64, 64, rng);
  DenseMatrix<double> c(64, 64);
  be->gemm(1.0, a.view(), b.view(), 0.0, c.view());
  expect_gemm_close(c, testing::naive_matmul(a, b), a, b, 50);
}

TEST_P(BackendTest, GemmOnSubmatrixViewsAndRaggedShapes) {
  Rng rng(9);
  auto big = testing::random_matrix<double>(150, 140, rng);
  const auto a = testing::random_matrix<double>(77, 13, rng);
  const auto b = testing::random_matrix<double>(13, 69, rng);
  auto before = big;
  be->gemm(-1.0, a.view(), b.view(), 1.0, big.view().block(5, 7, 77, 69));
  const auto ab = testing::naive_matmul(a, b);
  for (std::size_t j = 0; j < 140; ++j)
    for (std::size_t i = 0; i < 150; ++i) {
      const bool inside = i >= 5 && i < 82 && j >= 7 && j < 76;
      const double expect = inside ? before(i, j) - ab(i - 5, j - 7) : before(i, j);
      ASSERT_NEAR(big(i, j), expect, 1e-13) << i << "," << j;
    }
}

TEST_P(BackendTest, TrsmLowerUnitExamples) {
  DenseMatrix<double> l(2, 2, 9.0);  // diagonal and upper part are ignored
  l(1, 0) = 0.5;
  auto b = DenseMatrix<double>::from_rows({{2}, {3}});
  be->trsm_lower_unit(l.view(), b.view());
  EXPECT_EQ(b(0, 0), 2.0);
  EXPECT_EQ(b(1, 0), 2.0);

  DenseMatrix<double> eye_like(3, 3, 0.0);
  for (std::size_t i = 0; i < 3; ++i) eye_like(i, i) = 4.0;
  Rng rng(10);
  auto z = testing::random_matrix<double>(3, 2, rng);
  const auto orig = z;
  be->trsm_lower_unit(eye_like.view(), z.view());
  EXPECT_EQ(z, orig);
}

TEST_P(BackendTest, TrsmResidualOracle) {
  Rng rng(11);
  auto l = testing::random_matrix<double>(8, 8, rng);
  for (std::size_t j = 0; j < 8; ++j) {
    l(j, j) = 1.0;
    for (std::size_t i = 0; i < j; ++i) l(i, j) = 0.0;
  }
  const auto b = testing::random_matrix<double>(8, 4, rng);
  auto z = b;
  be->trsm_lower_unit(l.view(), z.view());
  const double res = testing::frobenius_diff(testing::naive_matmul(l, z), b);
  EXPECT_LE(res, 10 * 8 * unit_roundoff<double>() * frobenius_norm(b));

  auto u = testing::random_matrix<double>(8, 8, rng);
  for (std::size_t j = 0; j < 8; ++j) {
    u(j, j) += 4.0;
    for (std::size_t i = j + 1; i < 8; ++i) u(i, j) = 0.0;
  }
  auto w = b;
  be->trsm_upper(u.view(), w.view());
  EXPECT_LE(testing::frobenius_diff(testing::naive_matmul(u, w), b),
            10 * 8 * unit_roundoff<double>() * frobenius_norm(b));
  u(3, 3) = 0;
  EXPECT_THROW(be->trsm_upper(u.view(), w.view()), SingularError);
}

TEST_P(BackendTest, EveryCallBumpsExactlyOneCounterByOne) {
  Rng rng(12);
  const auto a = testing::random_matrix<double>(6, 6, rng);
  auto c = a;
  Vector<double> x = testing::random_vector<double>(6, rng), y(6);
  const std::vector<std::function<void()>> calls = {
      [&] { be->axpy(1.0, x, y); },
      [&] { be->dot(x, x); },
      [&] { be->nrm2(x); },
      [&] { be->scal(2.0, y); },
      [&] { be->iamax(x); },
      [&] { be->gemv(a.view(), x, y); },
      [&] { be->ger(1.0, x, x, c.view()); },
      [&] { be->gemm(1.0, a.view(), a.view(), 0.0, c.view()); },
      [&] { be->trsm_lower_unit(a.view(), c.view()); },
  };
  for (const auto& call : calls) {
    const auto before = be->counters();
    call();
    EXPECT_EQ(be->counters().total_calls(), before.total_calls() + 1);
  }
  EXPECT_EQ(be->counters().axpy.calls, 1u);
  EXPECT_EQ(be->counters().gemm.calls, 1u);
  EXPECT_EQ(be->counters().gemm.madds, 216u);
  EXPECT_EQ(be->counters().trsm.madds, 6u * 15u);
  be->reset_counters();
  EXPECT_EQ(be->counters(), BackendCounters{});
}

TEST_P(BackendTest, RepeatedCallsAreBitwiseIdentical) {
  Rng rng(13);
  const auto a = testing::random_matrix<double>(200, 190, rng);
  const auto b = testing::random_matrix<double>(190, 210, rng);
  DenseMatrix<double> c1(200, 210), c2(200, 210);
  be->gemm(1.0, a.view(), b.view(), 0.0, c1.view());
  be->gemm(1.0, a.view(), b.view(), 0.0, c2.view());
  EXPECT_EQ(c1, c2);
}

INSTANTIATE_TEST_SUITE_P(Backends, BackendTest, ::testing::Values("reference", "blocked"),
                         [](const auto& info) { return info.param; });

TEST(BackendRegistry, UnknownNameRejected) {
  EXPECT_THROW(make_backend<double>("gpu"), std::invalid_argument);
  EXPECT_EQ(make_backend<float>("blocked")->name(), "blocked");
}

TEST(BlockedBackend, ThreadCountDoesNotChangeResults) {
  Rng rng(14);
  const auto a = testing::random_matrix<double>(300, 130, rng);
  const auto b = testing::random_matrix<double>(130, 170, rng);
  DenseMatrix<double> c1(300, 170), c2(300, 170);
  BlockedBackend<double>({64, 1}).gemm(1.0, a.view(), b.view(), 0.0, c1.view());
  BlockedBackend<double>({64, 3}).gemm(1.0, a.view(), b.view(), 0.0, c2.view());
  EXPECT_EQ(c1, c2);
}

// Reference and blocked backends agree on 50 random instances per size.
class BackendEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(BackendEquivalence, AllOperationsAgree) {
  const std::size_t n = GetParam();
  ReferenceBackend<double> ref;
  BlockedBackend<double> blk;
  Rng rng(100 + n);
  const double eps = unit_roundoff<double>();
  for (int t = 0; t < 50; ++t) {
    const auto x = testing::random_vector<double>(n, rng);
    const auto y = testing::random_vector<double>(n, rng);
    const auto a = testing::random_matrix<double>(n, n, rng);
    const auto b = testing::random_matrix<double>(n, n, rng);

    auto y1 = y, y2 = y;
    ref.axpy(0.7, x, y1);
    blk.axpy(0.7, x, y2);
    ASSERT_EQ(y1, y2);

    double abs_dot = 0;
    for (std::size_t i = 0; i < n; ++i) abs_dot += std::abs(x[i] * y[i]);
    ASSERT_LE(std::abs(ref.dot(x, y) - blk.dot(x, y)), 2 * n * eps * abs_dot);
    ASSERT_NEAR(ref.nrm2(x), blk.nrm2(x), 2 * n * eps * ref.nrm2(x));
    ASSERT_EQ(ref.iamax(x), blk.iamax(x));

    Vector<double> g1(n), g2(n);
    ref.gemv(a.view(), x, g1);
    blk.gemv(a.view(), x, g2);
    for (std::size_t i = 0; i < n; ++i) {
      double bound = 0;
      for (std::size_t j = 0; j < n; ++j) bound += std::abs(a(i, j) * x[j]);
      ASSERT_LE(std::abs(g1[i] - g2[i]), 2 * n * eps * bound);
    }

    auto r1 = a, r2 = a;
    ref.ger(-0.3, x, y, r1.view());
    blk.ger(-0.3, x, y, r2.view());
    ASSERT_EQ(r1, r2);

    DenseMatrix<double> c1(n, n), c2(n, n);
    ref.gemm(1.0, a.view(), b.view(), 0.0, c1.view());
    blk.gemm(1.0, a.view(), b.view(), 0.0, c2.view());
    expect_gemm_close(c1, c2, a, b, 50);

    auto l = a;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) l(i, j) /= double(n);
    auto z1 = b, z2 = b;
    ref.trsm_lower_unit(l.view(), z1.view());
    blk.trsm_lower_unit(l.view(), z2.view());
    ASSERT_LE(testing::frobenius_diff(z1, z2), 10 * n * eps * frobenius_norm(z1));
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, BackendEquivalence, ::testing::Values(8, 64, 256));

}  // namespace
}  // namespace densolve
