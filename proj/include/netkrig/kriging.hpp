#pragma once

#include <Eigen/Dense>

#include "netkrig/graph.hpp"
#include "netkrig/traffic.hpp"

namespace netkrig {

// Sample mean and covariance of all link series over bins [t0-m, t0-1]
// (the m bins strictly before t0), covariance with divisor m-1.
struct MomentEstimate {
    Eigen::VectorXd mean;        // per link
    Eigen::MatrixXd covariance;  // link x link
    long window = 0;
    long at_time = 0;
};

MomentEstimate windowed_moments(const TraceSet& links, long t0, long m);
MomentEstimate windowed_moments(const Eigen::MatrixXd& values, long t0, long m);

struct KrigingPrediction {
    Eigen::VectorXd predicted;          // one entry per unobserved link
    Eigen::MatrixXd error_covariance;   // |U| x |U|
    bool regularized = false;           // pseudo-inverse fallback engaged
};

// Empirical BLUP: predicted = mu_u + S_uo S_oo^-1 (y_o - mu_o), error
// covariance S_uu - S_uo S_oo^-1 S_ou.  Link ids in `s` select blocks of the
// full-network moments (row of link id k is k-1).
KrigingPrediction simple_krige(const MomentEstimate& moments, const Eigen::VectorXd& y_o,
                               const ObservationScenario& s);

// Single-scale fit of the observed covariance to the route overlap pattern:
//   argmin_s2 || vec(sigma_yo_hat) - s2 * vec(A_o A_o^t) ||
double estimate_sigma_x(const Eigen::MatrixXd& sigma_yo_hat, const Eigen::MatrixXd& A_o);

// Ordinary kriging from the routing-induced variogram
//   v_ij = sigma_x2 * ((AA^t)_ii + (AA^t)_jj - 2 (AA^t)_ij)
// Weights solve the Lagrange-augmented system per unobserved link and sum to
// one; the multiplier is dropped from the returned weights.  error_covariance
// is diagonal: the per-link kriging variance.
struct OrdinaryKrigeResult {
    Eigen::VectorXd predicted;
    Eigen::MatrixXd error_covariance;
    Eigen::MatrixXd weights;  // |O| x |U|, column per unobserved link
    bool regularized = false;
};

OrdinaryKrigeResult ordinary_krige(const RoutingMatrix& routing, const ObservationScenario& s,
                                   double sigma_x2, const Eigen::VectorXd& y_o);

}  // namespace netkrig
