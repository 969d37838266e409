#pragma once

#include <Eigen/Dense>
#include <string>

#include "netkrig/traffic.hpp"

namespace netkrig {

// Column k = average of the flow traces over bins [k*w, (k+1)*w); the
// trailing partial window is dropped.
Eigen::MatrixXd window_means(const TraceSet& flows, long w);
Eigen::MatrixXd window_means(const Eigen::MatrixXd& values, long w);

// Orthonormal basis of the leading eigenvectors of the uncentered second
// moment B = sum_k xbar_k xbar_k^t of the window means.  The full spectrum is
// kept so captured energy can be reported for any basis size.
struct FactorModel {
    Eigen::MatrixXd F;            // J x p, orthonormal columns
    Eigen::VectorXd eigenvalues;  // all J, descending; empty when loaded from file
};

FactorModel fit_factor_matrix(const Eigen::MatrixXd& window_means, long p);

// (lambda_1+..+lambda_p) / (lambda_1+..+lambda_J); 1 when the total is zero.
// Requires the stored spectrum (a model loaded from file has none).
double energy_captured(const FactorModel& fm, long p);

// sum_{j>p} lambda_j: the projection residual left by the fitted basis
double residual_energy(const FactorModel& fm, long p);

// Factor files: header "p=<p> J=<J>", then J rows of p tab-separated values.
void write_factor_matrix(const FactorModel& fm, const std::string& path);
FactorModel read_factor_matrix(const std::string& path);

}  // namespace netkrig
