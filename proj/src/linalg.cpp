// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/linalg.hpp"

#include <cmath>
#include <string>

#include "asclt/error.hpp"

namespace asclt {
namespace {

void require_square_finite(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
  }
}

// vec() is column-major: vec(A X B) = (B^T (x) A) vec(X).
Eigen::MatrixXd lyapunov_operator(const Eigen::MatrixXd& u) {
  const Eigen::Index d = u.rows();
  const Eigen::Index n = d * d;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd ut = u.transpose();
  // R U   -> (U^T (x) I) vec(R)
  // U^T R -> (I (x) U^T) vec(R)
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      k.block(i * d, j * d, d, d) += ut(i, j) * Eigen::MatrixXd::Identity(d, d);
      if (i == j) k.block(i * d, j * d, d, d) += ut;
    }
  }
  return k;
}

}  // namespace

SquareMatrix::SquareMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  require_square_finite(m_);
}

SquareMatrix SquareMatrix::identity(Eigen::Index dim) {
  return SquareMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SquareMatrix SquareMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SquareMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& entries) {
  require_square_finite(entries);
  m_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index dim) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymmetricMatrix lyapunov_solve(const SquareMatrix& u) {
  const Eigen::MatrixXd& um = u.matrix();
  const Eigen::Index d = u.dim();
  if (!is_positive_definite(SymmetricMatrix(um + um.transpose()))) {
    throw Error(ErrorCode::kNotStabilizable,
                "U + U^T is not positive definite");
  }
  const Eigen::MatrixXd k = lyapunov_operator(um);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(eye.data(), d * d);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kNotStabilizable, "Lyapunov operator is singular");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - k * x);
  Eigen::MatrixXd r = Eigen::Map<const Eigen::MatrixXd>(x.data(), d, d);
  return SymmetricMatrix(r);
}

double lyapunov_residual(const SymmetricMatrix& r, const SquareMatrix& u) {
  if (r.dim() != u.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "lyapunov_residual");
  }
  const Eigen::MatrixXd& rm = r.matrix();
  const Eigen::MatrixXd& um = u.matrix();
  return (rm * um + um.transpose() * rm -
          Eigen::MatrixXd::Identity(u.dim(), u.dim()))
      .norm();
}

double logdet_sq(const SquareMatrix& v) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(v.matrix());
  if (lu.rank() < v.dim()) {
    throw Error(ErrorCode::kSingular, "logdet_sq: matrix is rank deficient");
  }
  double log_abs_det = 0.0;
  const auto& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    log_abs_det += std::log(std::abs(packed(i, i)));
  }
  if (log_abs_det < std::log(1e-300)) {
    throw Error(ErrorCode::kSingular, "logdet_sq: |det V| below 1e-300");
  }
  return 2.0 * log_abs_det;
}

bool is_positive_definite(const SymmetricMatrix& a, double tol) {
  const double scale = a.matrix().norm();
  if (!(scale > 0.0)) return false;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a.matrix());
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd pivots = ldlt.vectorD();
  return (pivots.array() > tol * scale).all();
}

bool psd_order_leq(const SymmetricMatrix& a, const SymmetricMatrix& b,
                   double tol) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "psd_order_leq: " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
  const double scale =
      std::max({1.0, a.matrix().norm(), b.matrix().norm()});
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      b.matrix() - a.matrix(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol * scale;
}

}  // namespace asclt
