#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "netkrig/chart.hpp"
#include "netkrig/common.hpp"
#include "netkrig/graph.hpp"
#include "netkrig/model.hpp"
#include "netkrig/traffic.hpp"

namespace netkrig {

enum class Method { Simple, Ordinary, NetworkSpecific };

Method parse_method(const std::string& name);  // "simple" | "ordinary" | "network-specific"
std::string method_name(Method method);

// Knobs shared by the scenario runner and the sweeps.
struct ModelConfig {
    long p = 2;              // factor count
    double gamma = 0.75;     // mean-variance exponent
    long window_m = 60;      // trailing estimation window (bins)
    long factor_window = 30; // coarse-window width when fitting factors from flows
    IglsOptions igls;
};

// Relative mean squared error: sum_t |pred_t - actual_t|^2 / sum_t |actual_t|^2.
double remse(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& actual);

struct PredictionRun {
    Method method = Method::Simple;
    int scenario_id = 0;  // preset id when applicable; 0 for custom scenarios
    ObservationScenario scenario;
    Eigen::MatrixXd predicted;  // unobserved links x evaluated bins
    Eigen::MatrixXd actual;
    double remse = 0.0;
    long fallback_bins = 0;  // bins predicted from the reference fit (network-specific only)
};

// Walks t0 over every bin after the warm-up (the first window_m bins), at
// each step fitting the chosen method from the trailing window and predicting
// the unobserved links at t0.  `flows` is only consulted by the
// network-specific method, to fit the factor basis, and may be null when
// `factors` supplies one directly.
//
// A noisy window can push the fitted flow means nonpositive, which aborts
// that window's fit.  Such bins are predicted from a reference fit instead:
// the fit from the earliest window position that succeeds.  The reference
// depends only on the traces, never on walk order, so serial and parallel
// walks produce identical output; the count of affected bins is reported in
// fallback_bins.  Only when no window position fits at all does the error
// propagate.
PredictionRun run_scenario(const TraceSet& links, const TraceSet* flows,
                           const RoutingMatrix& routing, const ObservationScenario& s,
                           Method method, const ModelConfig& config,
                           const Eigen::MatrixXd* factors = nullptr, Exec exec = Exec::Serial);

struct GammaCalibration {
    double gamma_hat = 0.0;
    double r_squared = 0.0;
    long window = 0;
};

// Log-log regression of per-flow standard deviation on per-flow mean over the
// first `window` bins; the slope estimates the mean-variance exponent.
GammaCalibration gamma_regression(const TraceSet& flows, long window);

struct MisspecOptions {
    long length = 20000;
    double hurst = 0.8;
    double sigma = 1.5;
    double gamma = 0.75;
    double mean_scale = 8000.0;
    int scenario_id = 8;
    long p = 2;
    IglsOptions igls;
};

struct MisspecReport {
    std::vector<long> windows;
    double baseline_stationary = 0.0;  // true-moment predictor, no trend
    double baseline_trend = 0.0;       // true-moment predictor, trend known
    std::vector<double> model_stationary;  // fitted model, per window
    std::vector<double> model_trend;
};

// Empirical MSE of the fitted predictor against a true-moment baseline, on
// stationary traffic and on the same traffic with a deterministic trend the
// model does not know about.  Seed-averaged.
MisspecReport misspecification_experiment(const std::vector<long>& windows,
                                          const TrendSpec& trend,
                                          const std::vector<std::uint64_t>& seeds,
                                          const MisspecOptions& opts = {});

enum class SweepParameter { Gamma, FactorCount, Window };

SweepParameter parse_sweep_parameter(const std::string& name);  // "gamma"|"p"|"m"
std::string sweep_parameter_name(SweepParameter parameter);

struct SweepReport {
    SweepParameter parameter = SweepParameter::Gamma;
    std::vector<double> grid;
    std::vector<int> scenario_ids;
    Eigen::MatrixXd remse_table;  // scenario x grid value
};

// ReMSE of the network-specific predictor over a parameter grid.
SweepReport sweep(SweepParameter parameter, const std::vector<double>& grid,
                  const std::vector<int>& scenario_ids, const TraceSet& links,
                  const TraceSet& flows, const RoutingMatrix& routing,
                  const ModelConfig& base_config);

struct AnomalyOptions {
    long onset = 0;  // first shifted bin; also the phase-I/phase-II boundary
    double alarm_fraction_threshold = 0.5;  // post-onset rate that marks a link alarming
};

struct LinkChartRun {
    int link = 0;
    std::vector<int> observed;  // links this one was predicted from
    ChartResult chart;
    double pre_alarm_rate = 0.0;
    double post_alarm_rate = 0.0;
};

struct AnomalyReport {
    std::vector<LinkChartRun> charts;     // one per monitored link
    std::vector<int> alarming_links;      // post-onset rate above the threshold
    std::vector<long> implicated_flows;   // 1-based; intersection of the alarming links' flows
};

// Injects a mean shift on one flow at `onset`, then charts the prediction
// residual of every monitored link.  Each monitored link is predicted from
// the links that share at least one flow with it but carry none of the
// shifted flow; prediction moments, residual variance, and the Hurst estimate
// are all frozen on the pre-onset segment.  Flows traversing every alarming
// link are reported as implicated.
AnomalyReport anomaly_experiment(const TraceSet& flows, const RoutingMatrix& routing,
                                 long flow_index, double shift,
                                 const std::vector<int>& monitored_links,
                                 const ChartConfig& chart_template,
                                 const AnomalyOptions& options);

// Deterministic synthetic mean structures for experiments: flow means lying
// exactly in the span of an orthonormal factor basis.
struct FactorMeans {
    Eigen::MatrixXd F;       // flows x rank, orthonormal columns
    Eigen::VectorXd beta;
    Eigen::VectorXd means;   // F * beta, strictly positive
};

FactorMeans rank1_factor_means(long flow_count, double scale);
FactorMeans rank2_factor_means(long flow_count, double scale);

// Report writers (tab-separated; deterministic given identical inputs).
void write_evaluate_report(const std::vector<PredictionRun>& runs, const std::string& path);
void write_sweep_report(const SweepReport& report, const std::string& path);
void write_misspec_report(const MisspecReport& report, const std::string& path);
void write_anomaly_summary(const AnomalyReport& report, const std::string& path);

}  // namespace netkrig
