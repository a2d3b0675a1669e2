// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "asclt/error.hpp"
#include "asclt/linalg.hpp"

namespace asclt {
namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(SquareMatrix, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(SquareMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
  EXPECT_THROW(SquareMatrix(mat2(1, NAN, 0, 1)), Error);
}

TEST(SymmetricMatrix, Symmetrizes) {
  const SymmetricMatrix s(mat2(1, 2, 0, 1));
  EXPECT_DOUBLE_EQ(s.matrix()(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.matrix()(1, 0), 1.0);
}

TEST(Lyapunov, IdentityGivesHalf) {
  const SymmetricMatrix r = lyapunov_solve(SquareMatrix::identity(3));
  EXPECT_TRUE(r.matrix().isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3), 1e-14));
}

TEST(Lyapunov, JordanBlockOracle) {
  // Hand solution of I = R U + U^T R for U = [[1, 1], [0, 1]].
  const SymmetricMatrix r = lyapunov_solve(SquareMatrix(mat2(1, 1, 0, 1)));
  EXPECT_NEAR(r.matrix()(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(r.matrix()(0, 1), -0.25, 1e-14);
  EXPECT_NEAR(r.matrix()(1, 1), 0.75, 1e-14);
  EXPECT_LE(lyapunov_residual(r, SquareMatrix(mat2(1, 1, 0, 1))), 1e-14);
}

TEST(Lyapunov, DiagonalOracle) {
  const SymmetricMatrix r = lyapunov_solve(SquareMatrix(mat2(0.5, 0, 0, 1)));
  EXPECT_NEAR(r.matrix()(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(r.matrix()(1, 1), 0.5, 1e-14);
  EXPECT_NEAR(r.matrix()(0, 1), 0.0, 1e-14);
}

TEST(Lyapunov, RandomStabilizableResidual) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 1 + rep % 5;
    Eigen::MatrixXd u(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) u(i, j) = n(rng);
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                          0.5 * (u + u.transpose())).eigenvalues().minCoeff();
    u += (0.2 - std::min(lo, 0.0)) * Eigen::MatrixXd::Identity(d, d);
    const SymmetricMatrix r = lyapunov_solve(SquareMatrix(u));
    EXPECT_LE(lyapunov_residual(r, SquareMatrix(u)), 1e-10);
    EXPECT_TRUE(is_positive_definite(r));
  }
}

TEST(Lyapunov, RejectsIndefiniteSymmetricPart) {
  try {
    lyapunov_solve(SquareMatrix(mat2(1, 0, 0, -1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotStabilizable);
  }
}

TEST(LogDet, DiagonalAndSingular) {
  EXPECT_NEAR(logdet_sq(SquareMatrix(mat2(2, 5, 0, 3))), 2.0 * std::log(6.0), 1e-14);
  EXPECT_NEAR(logdet_sq(SquareMatrix(mat2(0, 2, -3, 0))), 2.0 * std::log(6.0), 1e-14);
  try {
    logdet_sq(SquareMatrix(mat2(1, 2, 2, 4)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
}

TEST(PositiveDefinite, Basic) {
  EXPECT_TRUE(is_positive_definite(SymmetricMatrix(mat2(2, 1, 1, 2))));
  EXPECT_FALSE(is_positive_definite(SymmetricMatrix(mat2(1, 2, 2, 1))));
  EXPECT_FALSE(is_positive_definite(SymmetricMatrix(mat2(1, 0, 0, 0))));
}

TEST(PsdOrder, LoewnerOrder) {
  const SymmetricMatrix a(mat2(1, 0, 0, 1));
  const SymmetricMatrix b(mat2(2, 0.5, 0.5, 2));
  EXPECT_TRUE(psd_order_leq(a, b));
  EXPECT_FALSE(psd_order_leq(b, a));
  EXPECT_TRUE(psd_order_leq(a, a));
  EXPECT_THROW(psd_order_leq(a, SymmetricMatrix::identity(3)), Error);
}

}  // namespace
}  // namespace asclt
