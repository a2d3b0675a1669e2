// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_LINALG_HPP
#define ASCLT_LINALG_HPP

#include <Eigen/Dense>

namespace asclt {

/// Dense d x d real matrix with finite entries, d >= 1.
class SquareMatrix {
 public:
  explicit SquareMatrix(Eigen::MatrixXd entries);

  static SquareMatrix identity(Eigen::Index dim);
  static SquareMatrix diagonal(const Eigen::VectorXd& diag);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SquareMatrix transpose() const { return SquareMatrix(m_.transpose()); }

 private:
  Eigen::MatrixXd m_;
};

/// Square matrix symmetrized on construction: entries = (A + A^T) / 2.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Eigen::MatrixXd& entries);
  explicit SymmetricMatrix(const SquareMatrix& a)
      : SymmetricMatrix(a.matrix()) {}

  static SymmetricMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

/// Solves I = R U + U^T R for symmetric positive definite R.
///
/// The equation is vectorized into (I (x) U^T + U^T (x) I) vec(R) = vec(I) and
/// solved densely; one step of iterative refinement is applied. Throws
/// NotStabilizable when U + U^T is not positive definite.
SymmetricMatrix lyapunov_solve(const SquareMatrix& u);

/// Frobenius norm of R U + U^T R - I.
double lyapunov_residual(const SymmetricMatrix& r, const SquareMatrix& u);

/// log(det(V)^2) = 2 log|det V| from the pivots of a full-pivot LU.
/// Throws Singular on rank deficiency or |det V| below 1e-300.
double logdet_sq(const SquareMatrix& v);

/// True iff every pivot of a pivoted LDL^T factorization exceeds
/// tol * ||A||_F. Returns false instead of throwing on breakdown.
bool is_positive_definite(const SymmetricMatrix& a, double tol = 1e-10);

/// True iff B - A is positive semidefinite, allowing the smallest eigenvalue
/// down to -tol * max(1, ||A||_F, ||B||_F). Throws DimensionMismatch.
bool psd_order_leq(const SymmetricMatrix& a, const SymmetricMatrix& b,
                   double tol = 1e-10);

}  // namespace asclt

#endif  // ASCLT_LINALG_HPP
