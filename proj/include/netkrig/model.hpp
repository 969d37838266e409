#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "netkrig/factors.hpp"
#include "netkrig/graph.hpp"
#include "netkrig/kriging.hpp"

namespace netkrig {

// Average of each row over the m bins ending at t0 (inclusive).
Eigen::VectorXd ybar(const Eigen::MatrixXd& values, long t0, long m);

// Per-flow variance scale d_j = |(F beta)_j|^(2*gamma).
Eigen::VectorXd flow_variance_scale(const Eigen::MatrixXd& F, const Eigen::VectorXd& beta,
                                    double gamma);

// Weight matrix [A_o diag(|F beta|^(2 gamma)) A_o^t]^-1.  Flows that appear in
// A_o must have strictly positive fitted means; violations raise
// numerical_error listing the offending 1-based flow indices.
Eigen::MatrixXd g_matrix(const Eigen::VectorXd& beta, const Eigen::MatrixXd& F,
                         const Eigen::MatrixXd& A_o, double gamma);

struct IglsOptions {
    double convergence_eps = 1e-3;  // step-norm threshold, relative to the iterate magnitude
    long min_iterations = 20;
    long max_iterations = 200;
};

struct BetaEstimate {
    Eigen::VectorXd beta;                  // final iterate
    std::vector<Eigen::VectorXd> iterates; // beta_1 (OLS), beta_2, ...
    long iterations_run = 0;
    bool converged = false;
    bool used_pseudoinverse = false;
};

// Iterated GLS: beta_1 is ordinary least squares of ybar_o on A_o F; each
// refinement solves the normal equations reweighted by G(beta_k).  Stops once
// the step norm drops below convergence_eps after at least min_iterations
// estimates, or at max_iterations.  Rank-deficient systems use the
// Moore-Penrose solution and set used_pseudoinverse.
BetaEstimate igls_estimate(const Eigen::VectorXd& ybar_o, const Eigen::MatrixXd& A_o,
                           const Eigen::MatrixXd& F, double gamma,
                           const IglsOptions& options = {});

// Covariance of the GLS estimator: [(A_o F)^t G(beta) A_o F]^-1.
// Requires A_o F of full column rank.
Eigen::MatrixXd gls_covariance(const Eigen::VectorXd& beta, const Eigen::MatrixXd& F,
                               const Eigen::MatrixXd& A_o, double gamma);

// Blocks of Sigma(beta) = A diag(|F beta|^(2 gamma)) A^t for the scenario's
// observed/unobserved link sets.  Requires F beta strictly positive on every
// flow (the full network covariance is about to be used for prediction).
struct SigmaBlocks {
    Eigen::MatrixXd oo, ou, uo, uu;
};

SigmaBlocks sigma_blocks(const Eigen::VectorXd& beta, const Eigen::MatrixXd& F,
                         const RoutingMatrix& routing, double gamma,
                         const ObservationScenario& s);

// Scalar projection of the sample covariance onto the model covariance shape:
//   sigma2_hat = <vec(S_yo), vec(Sigma_oo)> / <vec(Sigma_oo), vec(Sigma_oo)>
double estimate_sigma(const Eigen::MatrixXd& sigma_yo_hat, const Eigen::MatrixXd& sigma_oo_of_beta);

// Variance of the m-bin average of a stationary series with variance sigma2
// and autocorrelation rho: (sigma2/m) (1 + 2 sum_{i<m} (1 - i/m) rho(i)).
double sigma_m2(double sigma2, const std::function<double(long)>& rho, long m);

// A fitted network model at one time point, ready for plug-in prediction.
struct ModelFit {
    BetaEstimate beta;
    Eigen::MatrixXd F;
    double gamma = 0.75;
    double sigma2_hat = 0;
    ObservationScenario scenario;
    Eigen::MatrixXd A_o, A_u;
    SigmaBlocks blocks;
};

// Fits the model from the link trace at time t0 using the trailing window of
// m bins (inclusive of t0): ybar -> iGLS -> covariance blocks -> sigma2_hat.
ModelFit fit_model(const Eigen::MatrixXd& link_values, const RoutingMatrix& routing,
                   const ObservationScenario& s, const Eigen::MatrixXd& F, double gamma, long t0,
                   long m, const IglsOptions& options = {});

// Plug-in BLUP: A_u F beta + Sigma_uo Sigma_oo^-1 (y_o - A_o F beta), with
// error covariance sigma2_hat * (Sigma_uu - Sigma_uo Sigma_oo^-1 Sigma_ou).
KrigingPrediction plug_in_predict(const ModelFit& fit, const Eigen::VectorXd& y_o);

// Model-fit record: flat key=value text file.
void write_model_fit(const ModelFit& fit, const std::string& f_file_reference,
                     const std::string& path);

}  // namespace netkrig
