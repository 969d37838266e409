#include "netkrig/kriging.hpp"

#include <stdexcept>
#include <string>

#include "netkrig/errors.hpp"
#include "netkrig/linalg.hpp"

namespace netkrig {

MomentEstimate windowed_moments(const Eigen::MatrixXd& values, long t0, long m) {
    if (m < 2) throw std::invalid_argument("moment window must be >= 2, got " + std::to_string(m));
    if (t0 - m < 0)
        throw std::invalid_argument("insufficient history: t0=" + std::to_string(t0) +
                                    " needs " + std::to_string(m) + " past bins");
    if (t0 > values.cols())
        throw std::invalid_argument("t0=" + std::to_string(t0) + " beyond trace length " +
                                    std::to_string(values.cols()));
    const auto block = values.middleCols(t0 - m, m);
    MomentEstimate est;
    est.mean = block.rowwise().mean();
    const Eigen::MatrixXd centered = block.colwise() - est.mean;
    est.covariance = centered * centered.transpose() / static_cast<double>(m - 1);
    est.window = m;
    est.at_time = t0;
    return est;
}

MomentEstimate windowed_moments(const TraceSet& links, long t0, long m) {
    return windowed_moments(links.values, t0, m);
}

namespace {

// link ids are contiguous from 1, so id k occupies row k-1
std::vector<Eigen::Index> indices_for(const std::vector<int>& link_ids, Eigen::Index count) {
    std::vector<Eigen::Index> idx;
    idx.reserve(link_ids.size());
    for (int id : link_ids) {
        if (id < 1 || id > count)
            throw std::invalid_argument("link id " + std::to_string(id) + " outside 1.." +
                                        std::to_string(count));
        idx.push_back(id - 1);
    }
    return idx;
}

Eigen::MatrixXd pick_block(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& rows,
                           const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = M(rows[r], cols[c]);
    return out;
}

Eigen::VectorXd pick(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

}  // namespace

KrigingPrediction simple_krige(const MomentEstimate& moments, const Eigen::VectorXd& y_o,
                               const ObservationScenario& s) {
    const Eigen::Index L = moments.mean.size();
    const auto o = indices_for(s.observed, L);
    const auto u = indices_for(s.unobserved, L);
    if (y_o.size() != static_cast<Eigen::Index>(o.size()))
        throw std::invalid_argument("observed value count " + std::to_string(y_o.size()) +
                                    " does not match scenario (" + std::to_string(o.size()) +
                                    " links)");

    const Eigen::MatrixXd S_oo = pick_block(moments.covariance, o, o);
    const Eigen::MatrixXd S_uo = pick_block(moments.covariance, u, o);
    const Eigen::MatrixXd S_uu = pick_block(moments.covariance, u, u);
    const Eigen::VectorXd mu_o = pick(moments.mean, o);
    const Eigen::VectorXd mu_u = pick(moments.mean, u);

    KrigingPrediction out;
    const Eigen::MatrixXd gain =
        psd_solve(S_oo, S_uo.transpose(), &out.regularized, "simple_krige").transpose();
    out.predicted = mu_u + gain * (y_o - mu_o);
    out.error_covariance = S_uu - gain * S_uo.transpose();
    // symmetrize rounding noise from the two-step product
    out.error_covariance = 0.5 * (out.error_covariance + out.error_covariance.transpose());
    return out;
}

double estimate_sigma_x(const Eigen::MatrixXd& sigma_yo_hat, const Eigen::MatrixXd& A_o) {
    const Eigen::MatrixXd gram = A_o * A_o.transpose();
    const double denom = gram.squaredNorm();
    if (denom == 0) throw std::invalid_argument("A_o A_o^t is zero; no route overlap to fit");
    if (sigma_yo_hat.rows() != gram.rows() || sigma_yo_hat.cols() != gram.cols())
        throw std::invalid_argument("covariance block does not match A_o row count");
    return sigma_yo_hat.cwiseProduct(gram).sum() / denom;
}

OrdinaryKrigeResult ordinary_krige(const RoutingMatrix& routing, const ObservationScenario& s,
                                   double sigma_x2, const Eigen::VectorXd& y_o) {
    if (!(sigma_x2 > 0)) throw std::invalid_argument("sigma_x2 must be positive");
    validate_scenario(s, routing);
    const Eigen::Index n_o = static_cast<Eigen::Index>(s.observed.size());
    const Eigen::Index n_u = static_cast<Eigen::Index>(s.unobserved.size());
    if (y_o.size() != n_o)
        throw std::invalid_argument("observed value count does not match scenario");

    const Eigen::MatrixXd gram = routing.A * routing.A.transpose();
    const auto o = indices_for(s.observed, gram.rows());
    const auto u = indices_for(s.unobserved, gram.rows());

    // full variogram v_ij = E(Y_i - Y_j)^2 on the needed blocks
    auto vario = [&](Eigen::Index i, Eigen::Index j) {
        return sigma_x2 * (gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
    };

    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n_o + 1, n_o + 1);
    for (Eigen::Index i = 0; i < n_o; ++i)
        for (Eigen::Index j = 0; j < n_o; ++j) system(i, j) = vario(o[i], o[j]);
    system.row(n_o).head(n_o).setOnes();
    system.col(n_o).head(n_o).setOnes();

    OrdinaryKrigeResult out;
    out.predicted.resize(n_u);
    out.error_covariance = Eigen::MatrixXd::Zero(n_u, n_u);
    out.weights.resize(n_o, n_u);
    for (Eigen::Index k = 0; k < n_u; ++k) {
        Eigen::VectorXd rhs(n_o + 1);
        for (Eigen::Index i = 0; i < n_o; ++i) rhs[i] = vario(o[i], u[k]);
        rhs[n_o] = 1.0;
        const Eigen::VectorXd sol =
            symmetric_solve(system, rhs, &out.regularized, "ordinary_krige");
        const Eigen::VectorXd lambda = sol.head(n_o);
        const double multiplier = sol[n_o];
        out.weights.col(k) = lambda;
        out.predicted[k] = lambda.dot(y_o);
        // semivariogram identity: kriging variance = lambda^t gamma_u + mu,
        // with gamma = v/2 and the multiplier scaling accordingly
        out.error_covariance(k, k) = 0.5 * (lambda.dot(rhs.head(n_o)) + multiplier);
    }
    return out;
}

}  // namespace netkrig
