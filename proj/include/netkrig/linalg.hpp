#pragma once

#include <Eigen/Dense>

namespace netkrig {

// Solve S X = B for symmetric positive-semidefinite S via eigendecomposition.
// Eigenvalues below 1e-10 of the largest are treated as zero and their
// directions dropped (Moore-Penrose behaviour); when that happens
// `*regularized` is set.  A materially negative eigenvalue means S is not a
// covariance and raises numerical_error.  `op_name` labels errors.
Eigen::MatrixXd psd_solve(const Eigen::MatrixXd& S, const Eigen::MatrixXd& B, bool* regularized,
                          const char* op_name = "psd_solve");

// Inverse with the same drop-rank policy.
Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& S, bool* regularized,
                            const char* op_name = "psd_inverse");

// Solve a symmetric (possibly indefinite) system by LU with full pivoting;
// rank-deficient systems fall back to the SVD pseudo-inverse solution
// (relative singular-value tolerance 1e-10) and set `*regularized`.
Eigen::VectorXd symmetric_solve(const Eigen::MatrixXd& S, const Eigen::VectorXd& b,
                                bool* regularized, const char* op_name = "symmetric_solve");

}  // namespace netkrig
