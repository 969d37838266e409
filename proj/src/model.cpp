#include "netkrig/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "netkrig/common.hpp"
#include "netkrig/errors.hpp"
#include "netkrig/linalg.hpp"

namespace netkrig {

Eigen::VectorXd ybar(const Eigen::MatrixXd& values, long t0, long m) {
    if (m < 1) throw std::invalid_argument("window must be >= 1, got " + std::to_string(m));
    if (t0 - m + 1 < 0 || t0 >= values.cols())
        throw std::invalid_argument("insufficient history for window ending at t0=" +
                                    std::to_string(t0));
    return values.middleCols(t0 - m + 1, m).rowwise().mean();
}

Eigen::VectorXd flow_variance_scale(const Eigen::MatrixXd& F, const Eigen::VectorXd& beta,
                                    double gamma) {
    if (F.cols() != beta.size())
        throw std::invalid_argument("beta length does not match factor count");
    return (F * beta).array().abs().pow(2.0 * gamma);
}

namespace {

// 1-based indices of flows with any nonzero entry in the given rows of A
std::vector<long> active_flows(const Eigen::MatrixXd& A_rows) {
    std::vector<long> idx;
    for (Eigen::Index j = 0; j < A_rows.cols(); ++j)
        if (A_rows.col(j).cwiseAbs().sum() > 0) idx.push_back(j + 1);
    return idx;
}

void require_positive_means(const Eigen::VectorXd& mu, const std::vector<long>& flows,
                            const char* op) {
    std::string bad;
    for (long j : flows)
        if (!(mu[j - 1] > 0)) bad += (bad.empty() ? "" : ",") + std::to_string(j);
    if (!bad.empty())
        throw numerical_error(op, "fitted flow means are not strictly positive on flows " + bad);
}

Eigen::MatrixXd scaled_gram(const Eigen::MatrixXd& rows_a, const Eigen::MatrixXd& rows_b,
                            const Eigen::VectorXd& d) {
    return rows_a * d.asDiagonal() * rows_b.transpose();
}

}  // namespace

Eigen::MatrixXd g_matrix(const Eigen::VectorXd& beta, const Eigen::MatrixXd& F,
                         const Eigen::MatrixXd& A_o, double gamma) {
    if (A_o.cols() != F.rows())
        throw std::invalid_argument("A_o columns do not match factor rows");
    const Eigen::VectorXd mu = F * beta;
    require_positive_means(mu, active_flows(A_o), "g_matrix");
    const Eigen::VectorXd d = mu.array().abs().pow(2.0 * gamma);
    const Eigen::MatrixXd S = scaled_gram(A_o, A_o, d);
    bool regularized = false;
    Eigen::MatrixXd G = psd_inverse(S, &regularized, "g_matrix");
    if (regularized)
        throw numerical_error("g_matrix",
                              "A_o diag(|F beta|^(2 gamma)) A_o^t is rank deficient");
    return G;
}

namespace {

// one weighted normal-equation solve: argmin (ybar - A_o F b)^t G (ybar - A_o F b)
Eigen::VectorXd weighted_step(const Eigen::MatrixXd& AoF, const Eigen::MatrixXd& S_oo,
                              const Eigen::VectorXd& ybar_o, bool* used_pinv) {
    // W = G * AoF without forming G
    bool reg = false;
    const Eigen::MatrixXd W = psd_solve(S_oo, AoF, &reg, "igls_estimate");
    if (reg)
        throw numerical_error("igls_estimate", "observed-link weighting matrix is singular");
    const Eigen::MatrixXd M = AoF.transpose() * W;
    const Eigen::VectorXd rhs = W.transpose() * ybar_o;
    bool rank_deficient = false;
    Eigen::VectorXd b = psd_solve(0.5 * (M + M.transpose()), rhs, &rank_deficient,
                                  "igls_estimate");
    if (rank_deficient && used_pinv) *used_pinv = true;
    return b;
}

}  // namespace

BetaEstimate igls_estimate(const Eigen::VectorXd& ybar_o, const Eigen::MatrixXd& A_o,
                           const Eigen::MatrixXd& F, double gamma, const IglsOptions& options) {
    if (A_o.rows() != ybar_o.size())
        throw std::invalid_argument("ybar length does not match A_o rows");
    if (A_o.cols() != F.rows())
        throw std::invalid_argument("A_o columns do not match factor rows");
    if (!(options.convergence_eps > 0))
        throw std::invalid_argument("convergence_eps must be positive");
    if (options.min_iterations < 1 || options.max_iterations < options.min_iterations)
        throw std::invalid_argument("need 1 <= min_iterations <= max_iterations");

    const Eigen::MatrixXd AoF = A_o * F;
    const auto active = active_flows(A_o);

    BetaEstimate est;

    // beta_1: ordinary least squares (G = identity)
    {
        const Eigen::MatrixXd M = AoF.transpose() * AoF;
        const Eigen::VectorXd rhs = AoF.transpose() * ybar_o;
        bool rank_deficient = false;
        est.beta = psd_solve(M, rhs, &rank_deficient, "igls_estimate");
        if (rank_deficient) est.used_pseudoinverse = true;
        est.iterates.push_back(est.beta);
        est.iterations_run = 1;
    }

    while (est.iterations_run < options.max_iterations) {
        const Eigen::VectorXd mu = F * est.beta;
        require_positive_means(mu, active, "igls_estimate");
        const Eigen::VectorXd d = mu.array().abs().pow(2.0 * gamma);
        const Eigen::MatrixXd S_oo = scaled_gram(A_o, A_o, d);
        const Eigen::VectorXd next = weighted_step(AoF, S_oo, ybar_o, &est.used_pseudoinverse);
        const double step = (next - est.beta).norm();
        est.beta = next;
        est.iterates.push_back(next);
        ++est.iterations_run;
        if (step < options.convergence_eps * std::max(1.0, next.norm()) &&
            est.iterations_run >= options.min_iterations) {
            est.converged = true;
            break;
        }
    }
    // the returned estimate must itself satisfy positivity on observed routes
    require_positive_means(F * est.beta, active, "igls_estimate");
    return est;
}

Eigen::MatrixXd gls_covariance(const Eigen::VectorXd& beta, const Eigen::MatrixXd& F,
                               const Eigen::MatrixXd& A_o, double gamma) {
    const Eigen::MatrixXd AoF = A_o * F;
    const Eigen::VectorXd mu = F * beta;
    require_positive_means(mu, active_flows(A_o), "gls_covariance");
    const Eigen::VectorXd d = mu.array().abs().pow(2.0 * gamma);
    const Eigen::MatrixXd S_oo = scaled_gram(A_o, A_o, d);
    bool reg = false;
    const Eigen::MatrixXd W = psd_solve(S_oo, AoF, &reg, "gls_covariance");
    if (reg) throw numerical_error("gls_covariance", "weighting matrix is singular");
    Eigen::MatrixXd M = AoF.transpose() * W;
    M = 0.5 * (M + M.transpose());
    bool rank_deficient = false;
    Eigen::MatrixXd cov = psd_inverse(M, &rank_deficient, "gls_covariance");
    if (rank_deficient)
        throw numerical_error("gls_covariance", "A_o F is not of full column rank");
    return 0.5 * (cov + cov.transpose());
}

SigmaBlocks sigma_blocks(const Eigen::VectorXd& beta, const Eigen::MatrixXd& F,
                         const RoutingMatrix& routing, double gamma,
                         const ObservationScenario& s) {
    validate_scenario(s, routing);
    const Eigen::VectorXd mu = F * beta;
    std::vector<long> all_flows(mu.size());
    for (long j = 0; j < mu.size(); ++j) all_flows[j] = j + 1;
    require_positive_means(mu, all_flows, "sigma_blocks");
    const Eigen::VectorXd d = mu.array().abs().pow(2.0 * gamma);

    const Eigen::MatrixXd A_o = rows_for_links(routing, s.observed);
    const Eigen::MatrixXd A_u = rows_for_links(routing, s.unobserved);
    SigmaBlocks blocks;
    blocks.oo = scaled_gram(A_o, A_o, d);
    blocks.uo = scaled_gram(A_u, A_o, d);
    blocks.ou = blocks.uo.transpose();
    blocks.uu = scaled_gram(A_u, A_u, d);
    return blocks;
}

double estimate_sigma(const Eigen::MatrixXd& sigma_yo_hat,
                      const Eigen::MatrixXd& sigma_oo_of_beta) {
    if (sigma_yo_hat.rows() != sigma_oo_of_beta.rows() ||
        sigma_yo_hat.cols() != sigma_oo_of_beta.cols())
        throw std::invalid_argument("covariance shapes do not match");
    const double denom = sigma_oo_of_beta.squaredNorm();
    if (denom == 0) throw std::invalid_argument("model covariance block is zero");
    const double coef = sigma_yo_hat.cwiseProduct(sigma_oo_of_beta).sum() / denom;
    // both inputs are PSD, so the projection is nonnegative up to rounding
    return std::max(coef, 0.0);
}

double sigma_m2(double sigma2, const std::function<double(long)>& rho, long m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(sigma2 > 0)) throw std::invalid_argument("sigma2 must be positive");
    double sum = 0;
    for (long i = 1; i < m; ++i)
        sum += (1.0 - static_cast<double>(i) / static_cast<double>(m)) * rho(i);
    return sigma2 / static_cast<double>(m) * (1.0 + 2.0 * sum);
}

ModelFit fit_model(const Eigen::MatrixXd& link_values, const RoutingMatrix& routing,
                   const ObservationScenario& s, const Eigen::MatrixXd& F, double gamma, long t0,
                   long m, const IglsOptions& options) {
    if (m < 2) throw std::invalid_argument("model window must be >= 2 to estimate sigma2");
    validate_scenario(s, routing);
    if (link_values.rows() != routing.A.rows())
        throw std::invalid_argument("link trace rows do not match routing matrix");

    ModelFit fit;
    fit.F = F;
    fit.gamma = gamma;
    fit.scenario = s;
    fit.A_o = rows_for_links(routing, s.observed);
    fit.A_u = rows_for_links(routing, s.unobserved);

    if (t0 - m + 1 < 0 || t0 >= link_values.cols())
        throw std::invalid_argument("insufficient history for window ending at t0=" +
                                    std::to_string(t0));

    // Copy only the trailing window (bins t0-m+1 .. t0) of the observed rows;
    // the fit never looks at the rest of the trace, and callers invoke this
    // once per bin over long traces.
    Eigen::MatrixXd Y_o(static_cast<long>(s.observed.size()), m);
    for (std::size_t i = 0; i < s.observed.size(); ++i)
        Y_o.row(i) = link_values.row(s.observed[i] - 1).segment(t0 - m + 1, m);

    const Eigen::VectorXd ybar_o = ybar(Y_o, m - 1, m);
    fit.beta = igls_estimate(ybar_o, fit.A_o, F, gamma, options);
    fit.blocks = sigma_blocks(fit.beta.beta, F, routing, gamma, s);

    const MomentEstimate mom = windowed_moments(Y_o, m, m);
    fit.sigma2_hat = estimate_sigma(mom.covariance, fit.blocks.oo);
    return fit;
}

KrigingPrediction plug_in_predict(const ModelFit& fit, const Eigen::VectorXd& y_o) {
    if (y_o.size() != fit.A_o.rows())
        throw std::invalid_argument("observed value count does not match fitted scenario");
    const Eigen::VectorXd mu = fit.F * fit.beta.beta;
    const Eigen::VectorXd mean_o = fit.A_o * mu;
    const Eigen::VectorXd mean_u = fit.A_u * mu;

    KrigingPrediction out;
    const Eigen::MatrixXd gain =
        psd_solve(fit.blocks.oo, fit.blocks.ou, &out.regularized, "plug_in_predict").transpose();
    out.predicted = mean_u + gain * (y_o - mean_o);
    out.error_covariance = fit.sigma2_hat * (fit.blocks.uu - gain * fit.blocks.ou);
    out.error_covariance = 0.5 * (out.error_covariance + out.error_covariance.transpose());
    return out;
}

void write_model_fit(const ModelFit& fit, const std::string& f_file_reference,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    out << "p = " << fit.F.cols() << '\n';
    out << "gamma = " << format_double(fit.gamma) << '\n';
    out << "sigma2_hat = " << format_double(fit.sigma2_hat) << '\n';
    out << "beta =";
    for (Eigen::Index i = 0; i < fit.beta.beta.size(); ++i)
        out << (i ? "," : " ") << format_double(fit.beta.beta[i]);
    out << '\n';
    out << "iterations_run = " << fit.beta.iterations_run << '\n';
    out << "converged = " << (fit.beta.converged ? "true" : "false") << '\n';
    out << "used_pseudoinverse = " << (fit.beta.used_pseudoinverse ? "true" : "false") << '\n';
    out << "observed_links =";
    for (std::size_t i = 0; i < fit.scenario.observed.size(); ++i)
        out << (i ? "," : " ") << fit.scenario.observed[i];
    out << '\n';
    out << "unobserved_links =";
    for (std::size_t i = 0; i < fit.scenario.unobserved.size(); ++i)
        out << (i ? "," : " ") << fit.scenario.unobserved[i];
    out << '\n';
    out << "f_file = " << f_file_reference << '\n';
    if (!out) throw config_error("failed writing '" + path + "'");
}

}  // namespace netkrig
