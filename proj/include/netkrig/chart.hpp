#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace netkrig {

// EWMA recursion state. The statistic starts at 0: chart inputs are
// prediction residuals, whose model mean is 0.
struct EwmaState {
    double lambda = 0.1;
    double current = 0.0;
    bool initialized = false;
};

EwmaState ewma_update(const EwmaState& state, double z);

// Stationary variance of the EWMA of i.i.d. observations: (lambda/(2-lambda)) sigma2.
double iid_ewma_variance(double lambda, double sigma2);

// Stationary variance of the EWMA when the observations are long-range
// dependent with Hurst parameter `hurst` and per-bin variance sigma2.
// Evaluates the spectral integral numerically to the given relative
// tolerance; throws numerical_error (with the achieved error estimate)
// if the quadrature cannot reach it.
double lrd_ewma_variance(double lambda, double sigma2, double hurst, double rel_tol = 1e-6);

// Wavelet (Haar) logscale-diagram estimate of the Hurst parameter.
// Requires at least 256 samples. The result is clamped to (0.01, 0.99);
// *clamped reports whether clamping occurred.
double estimate_hurst(const Eigen::VectorXd& series, bool* clamped = nullptr);

struct ChartConfig {
    double lambda = 0.1;
    double sigma2 = 1.0;  // residual variance
    double hurst = 0.5;
    double limit_multiplier = 3.0;
    bool lrd_adjusted = true;
    double quadrature_tol = 1e-6;
};

struct ChartResult {
    Eigen::VectorXd statistic;
    double limit = 0.0;  // alarms fire where |statistic| > limit
    std::vector<bool> alarms;
    std::optional<long> onset_marker;
};

// Chart the residual series: EWMA statistic against +/- limit_multiplier
// times the stationary EWMA standard deviation (LRD-adjusted or i.i.d.
// per config). The chart mean is 0 throughout.
ChartResult run_chart(const Eigen::VectorXd& residuals, const ChartConfig& config);

// Columns: time, statistic, limit, alarm (0/1), tab separated.
void write_chart(const ChartResult& result, const std::string& path);

}  // namespace netkrig
