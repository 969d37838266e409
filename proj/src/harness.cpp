#include "netkrig/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>

#include "netkrig/errors.hpp"
#include "netkrig/factors.hpp"
#include "netkrig/kriging.hpp"
#include "netkrig/linalg.hpp"

namespace netkrig {

Method parse_method(const std::string& name) {
    if (name == "simple") return Method::Simple;
    if (name == "ordinary") return Method::Ordinary;
    if (name == "network-specific") return Method::NetworkSpecific;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected simple, ordinary, or network-specific)");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::Simple: return "simple";
        case Method::Ordinary: return "ordinary";
        case Method::NetworkSpecific: return "network-specific";
    }
    throw std::invalid_argument("unknown method value");
}

double remse(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& actual) {
    if (predicted.rows() != actual.rows() || predicted.cols() != actual.cols())
        throw std::invalid_argument("predicted and actual shapes do not match");
    const double denom = actual.squaredNorm();
    if (denom == 0.0) throw std::invalid_argument("actual series is identically zero");
    return (predicted - actual).squaredNorm() / denom;
}

namespace {

Eigen::VectorXd pick_entries(const Eigen::VectorXd& full, const std::vector<int>& link_ids) {
    Eigen::VectorXd out(static_cast<long>(link_ids.size()));
    for (std::size_t i = 0; i < link_ids.size(); ++i) out[static_cast<long>(i)] = full[link_ids[i] - 1];
    return out;
}

Eigen::MatrixXd pick_rows(const Eigen::MatrixXd& full, const std::vector<int>& link_ids) {
    Eigen::MatrixXd out(static_cast<long>(link_ids.size()), full.cols());
    for (std::size_t i = 0; i < link_ids.size(); ++i) out.row(static_cast<long>(i)) = full.row(link_ids[i] - 1);
    return out;
}

}  // namespace

PredictionRun run_scenario(const TraceSet& links, const TraceSet* flows,
                           const RoutingMatrix& routing, const ObservationScenario& s,
                           Method method, const ModelConfig& config,
                           const Eigen::MatrixXd* factors, Exec exec) {
    if (links.kind != TraceSet::Kind::Link)
        throw std::invalid_argument("run_scenario needs link-level traces");
    if (links.values.rows() != routing.A.rows())
        throw std::invalid_argument("link trace rows do not match the routing matrix");
    validate_scenario(s, routing);
    const long m = config.window_m;
    if (m < 2) throw std::invalid_argument("estimation window must be >= 2");
    const long T = links.length();
    if (T < m + 1)
        throw std::invalid_argument("trace too short: need more than " + std::to_string(m) +
                                    " bins for warm-up");
    if (config.gamma < 0) throw std::invalid_argument("gamma must be nonnegative");

    Eigen::MatrixXd F;
    if (method == Method::NetworkSpecific) {
        if (factors) {
            F = *factors;
        } else {
            if (!flows)
                throw std::invalid_argument(
                    "network-specific method needs flow traces or a factor matrix");
            if (flows->kind != TraceSet::Kind::Flow)
                throw std::invalid_argument("factor fitting needs flow-level traces");
            if (flows->values.rows() != routing.A.cols())
                throw std::invalid_argument("flow trace rows do not match the routing matrix");
            F = fit_factor_matrix(window_means(flows->values, config.factor_window), config.p).F;
        }
        if (F.rows() != routing.A.cols())
            throw std::invalid_argument("factor matrix rows do not match the flow count");
    }

    const Eigen::MatrixXd A_o = rows_for_links(routing, s.observed);
    const Eigen::MatrixXd Y_obs = pick_rows(links.values, s.observed);

    // Reference fit for bins whose own window fit aborts on a positivity
    // failure: the earliest window position that fits.  Chosen from the
    // traces alone so serial and parallel walks agree bin for bin.
    std::optional<ModelFit> reference_fit;
    if (method == Method::NetworkSpecific) {
        for (long t0 = m; t0 < T; ++t0) {
            try {
                reference_fit =
                    fit_model(links.values, routing, s, F, config.gamma, t0, m, config.igls);
                break;
            } catch (const numerical_error&) {
                if (t0 + 1 == T) throw;  // no window position fits this run at all
            }
        }
    }
    std::atomic<long> fallback_bins{0};

    PredictionRun run;
    run.method = method;
    run.scenario = s;
    const long n_u = static_cast<long>(s.unobserved.size());
    run.predicted.resize(n_u, T - m);
    run.actual.resize(n_u, T - m);
    for (long i = 0; i < n_u; ++i)
        run.actual.row(i) = links.values.row(s.unobserved[static_cast<std::size_t>(i)] - 1)
                                .segment(m, T - m);

    auto predict_at = [&](long t0) {
        const Eigen::VectorXd y_o = pick_entries(links.values.col(t0), s.observed);
        Eigen::VectorXd pred;
        switch (method) {
            case Method::Simple: {
                const MomentEstimate mom = windowed_moments(links.values, t0, m);
                pred = simple_krige(mom, y_o, s).predicted;
                break;
            }
            case Method::Ordinary: {
                const MomentEstimate mom = windowed_moments(Y_obs, t0, m);
                const double sigma_x2 = estimate_sigma_x(mom.covariance, A_o);
                pred = ordinary_krige(routing, s, sigma_x2, y_o).predicted;
                break;
            }
            case Method::NetworkSpecific: {
                try {
                    const ModelFit fit =
                        fit_model(links.values, routing, s, F, config.gamma, t0, m, config.igls);
                    pred = plug_in_predict(fit, y_o).predicted;
                } catch (const numerical_error&) {
                    pred = plug_in_predict(*reference_fit, y_o).predicted;
                    fallback_bins.fetch_add(1, std::memory_order_relaxed);
                }
                break;
            }
        }
        run.predicted.col(t0 - m) = pred;
    };

    if (exec == Exec::Parallel) {
        std::atomic<bool> failed{false};
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
        for (long t0 = m; t0 < T; ++t0) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                predict_at(t0);
            } catch (...) {
#pragma omp critical
                {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (long t0 = m; t0 < T; ++t0) predict_at(t0);
    }

    run.fallback_bins = fallback_bins.load(std::memory_order_relaxed);
    run.remse = remse(run.predicted, run.actual);
    return run;
}

GammaCalibration gamma_regression(const TraceSet& flows, long window) {
    if (flows.kind != TraceSet::Kind::Flow)
        throw std::invalid_argument("gamma regression needs flow-level traces");
    const long J = flows.series_count();
    if (J < 3) throw std::invalid_argument("gamma regression needs at least 3 flows");
    if (window < 2 || window > flows.length())
        throw std::invalid_argument("window must lie in [2, trace length]");

    std::vector<double> xs, ys;
    xs.reserve(static_cast<std::size_t>(J));
    ys.reserve(static_cast<std::size_t>(J));
    for (long j = 0; j < J; ++j) {
        const auto seg = flows.values.row(j).head(window);
        const double mean = seg.mean();
        if (!(mean > 0))
            throw std::invalid_argument("flow " + std::to_string(j + 1) +
                                        " has nonpositive mean in the window");
        const double var =
            (seg.array() - mean).square().sum() / static_cast<double>(window - 1);
        if (!(var > 0))
            throw std::invalid_argument("flow " + std::to_string(j + 1) +
                                        " has zero variance in the window");
        xs.push_back(std::log(mean));
        ys.push_back(std::log(std::sqrt(var)));
    }

    const double n = static_cast<double>(J);
    double xbar = 0, yb = 0;
    for (long j = 0; j < J; ++j) {
        xbar += xs[static_cast<std::size_t>(j)];
        yb += ys[static_cast<std::size_t>(j)];
    }
    xbar /= n;
    yb /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (long j = 0; j < J; ++j) {
        const double dx = xs[static_cast<std::size_t>(j)] - xbar;
        const double dy = ys[static_cast<std::size_t>(j)] - yb;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0))
        throw std::invalid_argument("degenerate regression: all flow means are identical");

    GammaCalibration cal;
    cal.window = window;
    cal.gamma_hat = sxy / sxx;
    if (syy > 0) {
        const double ss_res = syy - sxy * sxy / sxx;
        cal.r_squared = std::max(0.0, 1.0 - ss_res / syy);
    } else {
        cal.r_squared = 1.0;  // constant response fitted exactly by a flat line
    }
    return cal;
}

MisspecReport misspecification_experiment(const std::vector<long>& windows,
                                          const TrendSpec& trend,
                                          const std::vector<std::uint64_t>& seeds,
                                          const MisspecOptions& opts) {
    if (windows.empty()) throw std::invalid_argument("window list is empty");
    for (long w : windows)
        if (w < 2) throw std::invalid_argument("estimation windows must be >= 2");
    if (seeds.empty()) throw std::invalid_argument("seed list is empty");
    if (opts.p < 1 || opts.p > 2)
        throw std::invalid_argument("the experiment's mean structure has rank 2; p must be 1 or 2");
    const long warm = *std::max_element(windows.begin(), windows.end());
    if (opts.length < warm + 2)
        throw std::invalid_argument("trace length must exceed the largest window");

    const Topology topo = internet2_topology();
    const RoutingMatrix routing = build_routing_matrix(topo);
    const FactorMeans fm = rank2_factor_means(routing.A.cols(), opts.mean_scale);
    const Eigen::MatrixXd F = fm.F.leftCols(opts.p);
    const ObservationScenario s = preset_scenario(opts.scenario_id);

    const Eigen::MatrixXd A_o = rows_for_links(routing, s.observed);
    const Eigen::MatrixXd A_u = rows_for_links(routing, s.unobserved);
    const Eigen::VectorXd flow_sd = opts.sigma * fm.means.array().pow(opts.gamma);
    const Eigen::VectorXd var_x = flow_sd.array().square();
    const Eigen::MatrixXd S_oo = A_o * var_x.asDiagonal() * A_o.transpose();
    const Eigen::MatrixXd S_ou = A_o * var_x.asDiagonal() * A_u.transpose();
    bool reg = false;
    const Eigen::MatrixXd gain = psd_solve(S_oo, S_ou, &reg, "misspecification_experiment").transpose();
    const Eigen::VectorXd mu_o = A_o * fm.means;
    const Eigen::VectorXd mu_u = A_u * fm.means;
    // the trend adds the same sinusoid to every flow, so each link shifts by
    // (number of flows it carries) * trend value
    const Eigen::VectorXd trend_gain_o = A_o.rowwise().sum();
    const Eigen::VectorXd trend_gain_u = A_u.rowwise().sum();

    MisspecReport report;
    report.windows = windows;
    report.model_stationary.assign(windows.size(), 0.0);
    report.model_trend.assign(windows.size(), 0.0);

    SynthesisSpec spec;
    spec.means = fm.means;
    spec.sigma = opts.sigma;
    spec.gamma = opts.gamma;
    spec.hurst = opts.hurst;
    spec.length = opts.length;

    const long T = opts.length;
    const double eval_count = static_cast<double>((T - warm) * A_u.rows());

    for (int regime = 0; regime < 2; ++regime) {
        for (std::uint64_t seed : seeds) {
            spec.seed = seed;
            TraceSet X = synthesize_flows(spec, routing.flow_labels);
            if (regime == 1) X = add_trend(X, trend);
            const TraceSet Y = route_traffic(routing, X);
            const Eigen::MatrixXd Y_o = pick_rows(Y.values, s.observed);
            const Eigen::MatrixXd Y_u = pick_rows(Y.values, s.unobserved);

            // baseline: prediction from the exact moments (trend known)
            double base_sq = 0;
            for (long t0 = warm; t0 < T; ++t0) {
                double tv = 0;
                if (regime == 1)
                    tv = trend.amplitude *
                         std::sin(2.0 * M_PI * static_cast<double>(t0) / trend.period +
                                  trend.phase);
                const Eigen::VectorXd pred =
                    mu_u + trend_gain_u * tv +
                    gain * (Y_o.col(t0) - mu_o - trend_gain_o * tv);
                base_sq += (pred - Y_u.col(t0)).squaredNorm();
            }
            (regime == 0 ? report.baseline_stationary : report.baseline_trend) +=
                base_sq / eval_count;

            for (std::size_t wi = 0; wi < windows.size(); ++wi) {
                const long m = windows[wi];
                // Reference fit for bins whose own window fit aborts on a
                // positivity failure (same policy as run_scenario).
                std::optional<ModelFit> reference_fit;
                for (long t0 = warm; t0 < T; ++t0) {
                    try {
                        reference_fit =
                            fit_model(Y.values, routing, s, F, opts.gamma, t0, m, opts.igls);
                        break;
                    } catch (const numerical_error&) {
                        if (t0 + 1 == T) throw;
                    }
                }
                double model_sq = 0;
                for (long t0 = warm; t0 < T; ++t0) {
                    Eigen::VectorXd pred;
                    try {
                        const ModelFit fit =
                            fit_model(Y.values, routing, s, F, opts.gamma, t0, m, opts.igls);
                        pred = plug_in_predict(fit, Y_o.col(t0)).predicted;
                    } catch (const numerical_error&) {
                        pred = plug_in_predict(*reference_fit, Y_o.col(t0)).predicted;
                    }
                    model_sq += (pred - Y_u.col(t0)).squaredNorm();
                }
                (regime == 0 ? report.model_stationary : report.model_trend)[wi] +=
                    model_sq / eval_count;
            }
        }
    }

    const double n_seeds = static_cast<double>(seeds.size());
    report.baseline_stationary /= n_seeds;
    report.baseline_trend /= n_seeds;
    for (double& v : report.model_stationary) v /= n_seeds;
    for (double& v : report.model_trend) v /= n_seeds;
    return report;
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "gamma") return SweepParameter::Gamma;
    if (name == "p") return SweepParameter::FactorCount;
    if (name == "m") return SweepParameter::Window;
    throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected gamma, p, or m)");
}

std::string sweep_parameter_name(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::FactorCount: return "p";
        case SweepParameter::Window: return "m";
    }
    throw std::invalid_argument("unknown sweep parameter value");
}

SweepReport sweep(SweepParameter parameter, const std::vector<double>& grid,
                  const std::vector<int>& scenario_ids, const TraceSet& links,
                  const TraceSet& flows, const RoutingMatrix& routing,
                  const ModelConfig& base_config) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (scenario_ids.empty()) throw std::invalid_argument("scenario list is empty");

    SweepReport report;
    report.parameter = parameter;
    report.grid = grid;
    report.scenario_ids = scenario_ids;
    report.remse_table.resize(static_cast<long>(scenario_ids.size()),
                              static_cast<long>(grid.size()));

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        ModelConfig config = base_config;
        const double v = grid[gi];
        switch (parameter) {
            case SweepParameter::Gamma:
                if (v < 0) throw std::invalid_argument("gamma grid values must be nonnegative");
                config.gamma = v;
                break;
            case SweepParameter::FactorCount: {
                const long p = std::lround(v);
                if (p < 1 || std::abs(v - static_cast<double>(p)) > 1e-9)
                    throw std::invalid_argument("p grid values must be positive integers");
                config.p = p;
                break;
            }
            case SweepParameter::Window: {
                const long m = std::lround(v);
                if (m < 2 || std::abs(v - static_cast<double>(m)) > 1e-9)
                    throw std::invalid_argument("m grid values must be integers >= 2");
                config.window_m = m;
                break;
            }
        }
        for (std::size_t si = 0; si < scenario_ids.size(); ++si) {
            const ObservationScenario s = preset_scenario(scenario_ids[si]);
            const PredictionRun run =
                run_scenario(links, &flows, routing, s, Method::NetworkSpecific, config);
            report.remse_table(static_cast<long>(si), static_cast<long>(gi)) = run.remse;
        }
    }
    return report;
}

AnomalyReport anomaly_experiment(const TraceSet& flows, const RoutingMatrix& routing,
                                 long flow_index, double shift,
                                 const std::vector<int>& monitored_links,
                                 const ChartConfig& chart_template,
                                 const AnomalyOptions& options) {
    if (flows.kind != TraceSet::Kind::Flow)
        throw std::invalid_argument("anomaly experiment needs flow-level traces");
    const long J = routing.A.cols();
    const long L = routing.A.rows();
    if (flows.values.rows() != J)
        throw std::invalid_argument("flow trace rows do not match the routing matrix");
    if (flow_index < 1 || flow_index > J)
        throw std::invalid_argument("flow index outside 1.." + std::to_string(J));
    if (monitored_links.empty()) throw std::invalid_argument("no monitored links");
    const long T = flows.length();
    // the pre-onset segment calibrates moments, residual variance, and Hurst
    if (options.onset < 256 || options.onset >= T)
        throw std::invalid_argument("onset must lie in [256, trace length)");

    std::set<int> carrying;
    for (long l = 0; l < L; ++l)
        if (routing.A(l, flow_index - 1) > 0) carrying.insert(static_cast<int>(l + 1));

    AnomalySpec anomaly;
    anomaly.flow_index = flow_index;
    anomaly.onset = options.onset;
    anomaly.shift = shift;
    const TraceSet Y = route_traffic(routing, inject_mean_shift(flows, anomaly));

    // phase-I moments from the clean prefix
    const MomentEstimate moments = windowed_moments(Y.values, options.onset, options.onset);

    AnomalyReport report;
    for (int link : monitored_links) {
        if (link < 1 || link > L)
            throw std::invalid_argument("monitored link id outside 1.." + std::to_string(L));
        std::vector<int> observed;
        for (int other = 1; other <= L; ++other) {
            if (other == link || carrying.count(other)) continue;
            const double overlap = routing.A.row(link - 1).dot(routing.A.row(other - 1));
            if (overlap > 0) observed.push_back(other);
        }
        if (observed.empty())
            throw std::invalid_argument("link " + std::to_string(link) +
                                        " has no clean correlated neighbors to predict from");

        ObservationScenario s;
        s.observed = observed;
        s.unobserved = {link};

        Eigen::VectorXd residuals(T);
        for (long t = 0; t < T; ++t) {
            const Eigen::VectorXd y_o = pick_entries(Y.values.col(t), observed);
            const KrigingPrediction pred = simple_krige(moments, y_o, s);
            residuals[t] = Y.values(link - 1, t) - pred.predicted[0];
        }

        const auto cal = residuals.head(options.onset);
        const double cal_mean = cal.mean();
        const double cal_var = (cal.array() - cal_mean).square().sum() /
                               static_cast<double>(options.onset - 1);

        ChartConfig config = chart_template;
        config.sigma2 = cal_var;
        config.hurst = estimate_hurst(cal);

        LinkChartRun run;
        run.link = link;
        run.observed = observed;
        run.chart = run_chart(residuals, config);
        run.chart.onset_marker = options.onset;

        long pre = 0, post = 0;
        for (long t = 0; t < T; ++t) {
            if (run.chart.alarms[static_cast<std::size_t>(t)]) {
                if (t < options.onset) ++pre; else ++post;
            }
        }
        run.pre_alarm_rate = static_cast<double>(pre) / static_cast<double>(options.onset);
        run.post_alarm_rate = static_cast<double>(post) / static_cast<double>(T - options.onset);
        if (run.post_alarm_rate > options.alarm_fraction_threshold)
            report.alarming_links.push_back(link);
        report.charts.push_back(std::move(run));
    }

    if (!report.alarming_links.empty()) {
        for (long j = 0; j < J; ++j) {
            bool on_all = true;
            for (int link : report.alarming_links)
                if (!(routing.A(link - 1, j) > 0)) {
                    on_all = false;
                    break;
                }
            if (on_all) report.implicated_flows.push_back(j + 1);
        }
    }
    return report;
}

FactorMeans rank1_factor_means(long flow_count, double scale) {
    if (flow_count < 1) throw std::invalid_argument("flow count must be >= 1");
    if (!(scale > 0)) throw std::invalid_argument("scale must be positive");
    FactorMeans fm;
    const double inv = 1.0 / std::sqrt(static_cast<double>(flow_count));
    fm.F = Eigen::MatrixXd::Constant(flow_count, 1, inv);
    fm.beta = Eigen::VectorXd::Constant(1, scale / inv);
    fm.means = fm.F * fm.beta;
    return fm;
}

FactorMeans rank2_factor_means(long flow_count, double scale) {
    if (flow_count < 3) throw std::invalid_argument("rank-2 means need at least 3 flows");
    if (!(scale > 0)) throw std::invalid_argument("scale must be positive");

    const double inv = 1.0 / std::sqrt(static_cast<double>(flow_count));
    Eigen::VectorXd v1 = Eigen::VectorXd::Constant(flow_count, inv);
    Eigen::VectorXd raw(flow_count);
    for (long j = 0; j < flow_count; ++j)
        raw[j] = std::sin(2.0 * M_PI * static_cast<double>(j + 1) /
                          static_cast<double>(flow_count));
    Eigen::VectorXd v2 = raw - v1.dot(raw) * v1;
    const double norm = v2.norm();
    if (!(norm > 1e-12))
        throw std::invalid_argument("degenerate second factor for this flow count");
    v2 /= norm;

    FactorMeans fm;
    fm.F.resize(flow_count, 2);
    fm.F.col(0) = v1;
    fm.F.col(1) = v2;
    fm.beta.resize(2);
    fm.beta[0] = scale / inv;
    // keep every mean inside [0.55, 1.45] * scale so variances stay comparable
    fm.beta[1] = 0.45 * scale / v2.cwiseAbs().maxCoeff();
    fm.means = fm.F * fm.beta;
    if (!(fm.means.minCoeff() > 0))
        throw std::invalid_argument("constructed means are not strictly positive");
    return fm;
}

namespace {
std::string scenario_label(const PredictionRun& run) {
    if (run.scenario_id > 0) return std::to_string(run.scenario_id);
    std::string label;
    for (std::size_t i = 0; i < run.scenario.observed.size(); ++i)
        label += (i ? "," : "") + std::to_string(run.scenario.observed[i]);
    label += "->";
    for (std::size_t i = 0; i < run.scenario.unobserved.size(); ++i)
        label += (i ? "," : "") + std::to_string(run.scenario.unobserved[i]);
    return label;
}

std::ofstream open_report(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    return out;
}
}  // namespace

void write_evaluate_report(const std::vector<PredictionRun>& runs, const std::string& path) {
    const Method order[] = {Method::Simple, Method::Ordinary, Method::NetworkSpecific};
    bool present[3] = {false, false, false};
    for (const auto& run : runs) present[static_cast<int>(run.method)] = true;

    // rows keyed by scenario in first-appearance order
    std::vector<std::string> row_labels;
    std::vector<std::array<double, 3>> cells;
    std::vector<std::array<bool, 3>> filled;
    for (const auto& run : runs) {
        const std::string label = scenario_label(run);
        std::size_t row = row_labels.size();
        for (std::size_t i = 0; i < row_labels.size(); ++i)
            if (row_labels[i] == label) {
                row = i;
                break;
            }
        if (row == row_labels.size()) {
            row_labels.push_back(label);
            cells.push_back({0, 0, 0});
            filled.push_back({false, false, false});
        }
        cells[row][static_cast<std::size_t>(run.method)] = run.remse;
        filled[row][static_cast<std::size_t>(run.method)] = true;
    }

    std::ofstream out = open_report(path);
    out << "scenario";
    for (int k = 0; k < 3; ++k)
        if (present[k]) out << '\t' << method_name(order[k]);
    out << '\n';
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        out << row_labels[r];
        for (int k = 0; k < 3; ++k) {
            if (!present[k]) continue;
            out << '\t';
            out << (filled[r][static_cast<std::size_t>(k)]
                        ? format_double(cells[r][static_cast<std::size_t>(k)])
                        : std::string("-"));
        }
        out << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

void write_sweep_report(const SweepReport& report, const std::string& path) {
    std::ofstream out = open_report(path);
    out << "parameter\t" << sweep_parameter_name(report.parameter) << '\n';
    out << "scenario";
    for (double v : report.grid) out << '\t' << format_double(v);
    out << '\n';
    for (std::size_t si = 0; si < report.scenario_ids.size(); ++si) {
        out << report.scenario_ids[si];
        for (std::size_t gi = 0; gi < report.grid.size(); ++gi)
            out << '\t'
                << format_double(report.remse_table(static_cast<long>(si),
                                                    static_cast<long>(gi)));
        out << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

void write_misspec_report(const MisspecReport& report, const std::string& path) {
    std::ofstream out = open_report(path);
    out << "regime\tbaseline";
    for (long m : report.windows) out << "\tm=" << m;
    out << '\n';
    out << "stationary\t" << format_double(report.baseline_stationary);
    for (double v : report.model_stationary) out << '\t' << format_double(v);
    out << '\n';
    out << "trend\t" << format_double(report.baseline_trend);
    for (double v : report.model_trend) out << '\t' << format_double(v);
    out << '\n';
    if (!out) throw config_error("failed writing '" + path + "'");
}

void write_anomaly_summary(const AnomalyReport& report, const std::string& path) {
    std::ofstream out = open_report(path);
    out << "link\tobserved\tpre_alarm_rate\tpost_alarm_rate\talarming\n";
    for (const auto& run : report.charts) {
        out << run.link << '\t';
        for (std::size_t i = 0; i < run.observed.size(); ++i)
            out << (i ? "," : "") << run.observed[i];
        out << '\t' << format_double(run.pre_alarm_rate) << '\t'
            << format_double(run.post_alarm_rate) << '\t'
            << (std::find(report.alarming_links.begin(), report.alarming_links.end(),
                          run.link) != report.alarming_links.end()
                    ? 1
                    : 0)
            << '\n';
    }
    out << "implicated_flows\t";
    if (report.implicated_flows.empty()) {
        out << '-';
    } else {
        for (std::size_t i = 0; i < report.implicated_flows.size(); ++i)
            out << (i ? "," : "") << report.implicated_flows[i];
    }
    out << '\n';
    if (!out) throw config_error("failed writing '" + path + "'");
}

}  // namespace netkrig
