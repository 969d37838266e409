#include "netkrig/chart.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "netkrig/common.hpp"
#include "netkrig/errors.hpp"

namespace netkrig {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kTwoPi = 2.0 * kPi;

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("lambda must lie in (0, 1]");
}
}  // namespace

EwmaState ewma_update(const EwmaState& state, double z) {
    check_lambda(state.lambda);
    EwmaState next = state;
    next.current = state.lambda * z + (1.0 - state.lambda) * state.current;
    next.initialized = true;
    return next;
}

double iid_ewma_variance(double lambda, double sigma2) {
    check_lambda(lambda);
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    // multiply by sigma2 last so scaling sigma2 scales the result exactly
    return lambda / (2.0 - lambda) * sigma2;
}

namespace {

// One tanh-sinh abscissa: t maps to theta in (a, b) with quadrature weight
// `weight`. Offsets from the nearer endpoint are computed directly so that
// points double-exponentially close to an endpoint keep full precision
// (needed for the integrable singularity at theta = 0).
struct DePoint {
    double theta = 0.0;
    double weight = 0.0;    // 0 marks a point beyond machine resolution
    double log_off = 0.0;   // log distance from the nearer endpoint
    double log_weight = 0.0;
    bool near_a = false;
};

DePoint de_point(double t, double a, double b) {
    const double span = b - a;
    const double w = kHalfPi * std::sinh(t);
    const double aw = std::abs(w);
    DePoint p;
    p.near_a = w < 0.0;
    if (2.0 * aw > 700.0) return p;  // offset underflows: weight stays 0
    const double q = std::exp(-2.0 * aw);
    const double off = span * q / (1.0 + q);
    if (off == 0.0) return p;
    p.theta = p.near_a ? a + off : b - off;
    p.weight = 2.0 * span * kHalfPi * std::cosh(t) * q / ((1.0 + q) * (1.0 + q));
    p.log_off = std::log(span) - 2.0 * aw - std::log1p(q);
    p.log_weight = std::log(2.0 * span * kHalfPi * std::cosh(t)) - 2.0 * aw - 2.0 * std::log1p(q);
    return p;
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

// Tanh-sinh quadrature of a nonnegative integrand over (a, b). `term_fn`
// receives the abscissa descriptor and returns integrand * weight, so the
// caller can switch to log-space evaluation next to a singular endpoint.
template <typename TermFn>
QuadResult tanh_sinh(TermFn&& term_fn, double a, double b, double rel_tol) {
    constexpr double kTMax = 8.0;
    constexpr int kMaxLevel = 12;

    double total = 0.0;  // running sum of terms; integral estimate = h * total

    auto add_points = [&](double h, bool odd_only) {
        double s = 0.0;
        for (int dir : {1, -1}) {
            long k = odd_only ? 1 : (dir > 0 ? 0 : 1);
            const long step = odd_only ? 2 : 1;
            int tiny_streak = 0;
            for (;; k += step) {
                const double t = dir * static_cast<double>(k) * h;
                if (std::abs(t) > kTMax) break;
                const DePoint p = de_point(t, a, b);
                if (p.weight == 0.0) break;
                const double term = term_fn(p);
                s += term;
                const double anchor = std::abs(total) + std::abs(s) + 1e-300;
                if (std::abs(term) <= 1e-2 * rel_tol * anchor) {
                    if (++tiny_streak >= 2) break;
                } else {
                    tiny_streak = 0;
                }
            }
        }
        return s;
    };

    double h = 1.0;
    total = add_points(h, false);
    double prev = h * total;
    QuadResult out;
    out.value = prev;
    out.error = std::abs(prev);
    for (int level = 1; level <= kMaxLevel; ++level) {
        h *= 0.5;
        total += add_points(h, true);
        out.value = h * total;
        out.error = std::abs(out.value - prev);
        prev = out.value;
        if (level >= 3 && out.error <= rel_tol * std::abs(out.value)) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace

double lrd_ewma_variance(double lambda, double sigma2, double hurst, double rel_tol) {
    check_lambda(lambda);
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::invalid_argument("hurst must lie in (0, 1)");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");

    const double s = 2.0 * hurst + 1.0;

    // Integrand of the spectral representation (even in theta):
    //   2(1 - cos t) |t|^{-2H-1} / (lambda^2 + (2 - 2 lambda)(1 - cos t))
    auto one_minus_cos = [](double theta) {
        const double sn = std::sin(0.5 * theta);
        return 2.0 * sn * sn;
    };
    auto plain = [&](double theta) {
        const double omc = one_minus_cos(theta);
        const double denom = lambda * lambda + (2.0 - 2.0 * lambda) * omc;
        return 2.0 * omc / denom * std::pow(theta, -s);
    };
    // Next to theta = 0 the integrand is theta^{1-2H} / lambda^2; evaluate in
    // log space once pow would overflow.
    auto head_term = [&](const DePoint& p) {
        if (p.near_a && p.theta < 1e-80) {
            const double log_term =
                (2.0 - s) * p.log_off - 2.0 * std::log(lambda) + p.log_weight;
            return std::exp(log_term);
        }
        return plain(p.theta) * p.weight;
    };
    auto window_term = [&](const DePoint& p) { return plain(p.theta) * p.weight; };

    // Fold the real line to 2 * [ head (0, 2pi) + one-period windows + tail ].
    // Past the last window the periodic factor g(t) = 2(1-cos t)/denominator
    // is replaced by its exact period mean 2/(2-lambda), whose t^{-s} integral
    // is closed-form and goes into the value; the zero-mean remainder
    // integrates by parts to at most pi * max(g) * T0^{-s}, which goes into
    // the error estimate.
    const QuadResult head = tanh_sinh(head_term, 0.0, kTwoPi, 0.25 * rel_tol);
    double total = head.value;
    double err = head.error;

    const double factor_max = 4.0 / ((2.0 - lambda) * (2.0 - lambda));
    const double factor_mean = 2.0 / (2.0 - lambda);
    constexpr long kMaxWindows = 200000;
    long k = 1;
    double tail_value = 0.0, tail_err = 0.0;
    for (;; ++k) {
        const double t0 = kTwoPi * static_cast<double>(k);
        tail_value = factor_mean * std::pow(t0, 1.0 - s) / (s - 1.0);
        tail_err = kPi * factor_max * std::pow(t0, -s);
        if (tail_err <= 0.2 * rel_tol * (total + tail_value) || k > kMaxWindows) break;
        const QuadResult piece =
            tanh_sinh(window_term, t0, kTwoPi * static_cast<double>(k + 1), 0.25 * rel_tol);
        total += piece.value;
        err += piece.error;
    }
    total += tail_value;
    err += tail_err;

    if (!std::isfinite(total) || !(total > 0.0) || err > rel_tol * total)
        throw numerical_error(
            "lrd_ewma_variance",
            "quadrature failed to converge; achieved relative error estimate " +
                format_double(total > 0.0 ? err / total : err));

    const double c2_squared = kPi / (hurst * std::tgamma(2.0 * hurst) * std::sin(hurst * kPi));
    const double base = lambda * lambda * (2.0 * total) / c2_squared;
    return base * sigma2;
}

double estimate_hurst(const Eigen::VectorXd& series, bool* clamped) {
    const long n = series.size();
    if (n < 256)
        throw std::invalid_argument("hurst estimation needs at least 256 samples, got " +
                                    std::to_string(n));
    const long levels = static_cast<long>(std::floor(std::log2(static_cast<double>(n)))) - 3;

    // Haar pyramid: detail energy per dyadic scale
    std::vector<double> approx(series.data(), series.data() + n);
    std::vector<double> xs, ys, ws;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (long j = 1; j <= levels; ++j) {
        const long half = static_cast<long>(approx.size()) / 2;
        if (half < 1) break;
        std::vector<double> next(static_cast<std::size_t>(half));
        double energy = 0.0;
        for (long i = 0; i < half; ++i) {
            const double d = (approx[2 * i] - approx[2 * i + 1]) * inv_sqrt2;
            next[static_cast<std::size_t>(i)] = (approx[2 * i] + approx[2 * i + 1]) * inv_sqrt2;
            energy += d * d;
        }
        approx = std::move(next);
        if (j < 3) continue;  // finest scales are dominated by measurement texture
        const double mu = energy / static_cast<double>(half);
        if (!(mu > 0.0))
            throw std::invalid_argument("series has no detail energy at scale " +
                                        std::to_string(j));
        xs.push_back(static_cast<double>(j));
        ys.push_back(std::log2(mu));
        ws.push_back(static_cast<double>(half));
    }
    if (xs.size() < 2)
        throw std::invalid_argument("series too short for the logscale regression");

    // weighted least squares: weight = number of detail coefficients at the scale
    double wsum = 0, xbar = 0, ybar_ = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        wsum += ws[i];
        xbar += ws[i] * xs[i];
        ybar_ += ws[i] * ys[i];
    }
    xbar /= wsum;
    ybar_ /= wsum;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
        sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar_);
    }
    const double slope = sxy / sxx;
    double hurst = 0.5 * (slope + 1.0);

    bool was_clamped = false;
    if (hurst <= 0.01) {
        hurst = 0.01;
        was_clamped = true;
    } else if (hurst >= 0.99) {
        hurst = 0.99;
        was_clamped = true;
    }
    if (clamped) *clamped = was_clamped;
    return hurst;
}

ChartResult run_chart(const Eigen::VectorXd& residuals, const ChartConfig& config) {
    check_lambda(config.lambda);
    if (!(config.sigma2 > 0.0)) throw std::invalid_argument("residual variance must be positive");
    if (!(config.limit_multiplier > 0.0))
        throw std::invalid_argument("limit multiplier must be positive");

    const double var =
        config.lrd_adjusted
            ? lrd_ewma_variance(config.lambda, config.sigma2, config.hurst,
                                config.quadrature_tol)
            : iid_ewma_variance(config.lambda, config.sigma2);

    ChartResult out;
    out.limit = config.limit_multiplier * std::sqrt(var);
    out.statistic.resize(residuals.size());
    out.alarms.resize(static_cast<std::size_t>(residuals.size()));
    EwmaState state;
    state.lambda = config.lambda;
    for (Eigen::Index t = 0; t < residuals.size(); ++t) {
        state = ewma_update(state, residuals[t]);
        out.statistic[t] = state.current;
        out.alarms[static_cast<std::size_t>(t)] = std::abs(state.current) > out.limit;
    }
    return out;
}

void write_chart(const ChartResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    out << "time\tstatistic\tlimit\talarm\n";
    for (Eigen::Index t = 0; t < result.statistic.size(); ++t) {
        out << t << '\t' << format_double(result.statistic[t]) << '\t'
            << format_double(result.limit) << '\t'
            << (result.alarms[static_cast<std::size_t>(t)] ? 1 : 0) << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

}  // namespace netkrig
