#include "netkrig/linalg.hpp"

#include <string>

#include "netkrig/errors.hpp"

namespace netkrig {

namespace {
constexpr double kRelTol = 1e-10;
}

Eigen::MatrixXd psd_solve(const Eigen::MatrixXd& S, const Eigen::MatrixXd& B, bool* regularized,
                          const char* op_name) {
    if (S.rows() != S.cols() || S.rows() != B.rows())
        throw std::invalid_argument(std::string(op_name) + ": dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    if (eig.info() != Eigen::Success)
        throw numerical_error(op_name, "eigendecomposition failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double lmax = lambda.cwiseAbs().maxCoeff();
    const double tol = kRelTol * (lmax > 0 ? lmax : 1.0);
    if (lambda.minCoeff() < -tol)
        throw numerical_error(op_name, "matrix is not positive semidefinite (eigenvalue " +
                                           std::to_string(lambda.minCoeff()) + ")");
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
    bool dropped = false;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > tol)
            inv[i] = 1.0 / lambda[i];
        else
            dropped = true;
    }
    if (regularized && dropped) *regularized = true;
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * B;
}

Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& S, bool* regularized, const char* op_name) {
    return psd_solve(S, Eigen::MatrixXd::Identity(S.rows(), S.rows()), regularized, op_name);
}

Eigen::VectorXd symmetric_solve(const Eigen::MatrixXd& S, const Eigen::VectorXd& b,
                                bool* regularized, const char* op_name) {
    if (S.rows() != S.cols() || S.rows() != b.size())
        throw std::invalid_argument(std::string(op_name) + ": dimension mismatch");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    lu.setThreshold(kRelTol);
    if (lu.isInvertible()) return lu.solve(b);
    if (regularized) *regularized = true;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRelTol);
    return svd.solve(b);
}

}  // namespace netkrig
