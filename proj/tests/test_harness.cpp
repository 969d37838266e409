#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "netkrig/errors.hpp"
#include "netkrig/graph.hpp"
#include "netkrig/harness.hpp"
#include "netkrig/traffic.hpp"

using namespace netkrig;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

TraceSet backbone_flows(const RoutingMatrix& routing, long length, std::uint64_t seed) {
    SynthesisSpec spec;
    spec.means = rank2_factor_means(72, 8000.0).means;
    spec.sigma = 1.5;
    spec.length = length;
    spec.seed = seed;
    return synthesize_flows(spec, routing.flow_labels);
}

}  // namespace

TEST_CASE("relative error worked by hand") {
    Eigen::MatrixXd actual(1, 2), predicted(1, 2);
    actual << 3, 4;
    predicted << 3, 4;
    REQUIRE(remse(predicted, actual) == 0.0);

    predicted << 7, 1;  // errors (4, -3): SSE 25 over SS 25
    REQUIRE(remse(predicted, actual) == Catch::Approx(1.0));

    predicted << 7, 4;  // SSE 16 over SS 25
    REQUIRE(remse(predicted, actual) == Catch::Approx(16.0 / 25.0));

    REQUIRE_THROWS_AS(remse(predicted, Eigen::MatrixXd::Zero(1, 2)), std::invalid_argument);
    REQUIRE_THROWS_AS(remse(Eigen::MatrixXd::Zero(1, 3), actual), std::invalid_argument);
}

TEST_CASE("relative error ignores the measurement unit") {
    Eigen::MatrixXd actual(2, 3), predicted(2, 3);
    actual << 5, 6, 7,
              8, 9, 10;
    predicted << 5.5, 5.5, 7.25,
                 8, 9.75, 9.5;
    const double base = remse(predicted, actual);
    REQUIRE(remse(4.0 * predicted, 4.0 * actual) == base);  // power of two: exact
    REQUIRE(remse(0.001 * predicted, 0.001 * actual) == Catch::Approx(base).epsilon(1e-12));
}

TEST_CASE("method and parameter names round-trip") {
    REQUIRE(parse_method("simple") == Method::Simple);
    REQUIRE(parse_method("ordinary") == Method::Ordinary);
    REQUIRE(parse_method("network-specific") == Method::NetworkSpecific);
    for (Method m : {Method::Simple, Method::Ordinary, Method::NetworkSpecific})
        REQUIRE(parse_method(method_name(m)) == m);
    REQUIRE_THROWS_AS(parse_method("kriging"), std::invalid_argument);

    REQUIRE(parse_sweep_parameter("gamma") == SweepParameter::Gamma);
    REQUIRE(parse_sweep_parameter("p") == SweepParameter::FactorCount);
    REQUIRE(parse_sweep_parameter("m") == SweepParameter::Window);
    for (SweepParameter s :
         {SweepParameter::Gamma, SweepParameter::FactorCount, SweepParameter::Window})
        REQUIRE(parse_sweep_parameter(sweep_parameter_name(s)) == s);
    REQUIRE_THROWS_AS(parse_sweep_parameter("lambda"), std::invalid_argument);
}

TEST_CASE("deterministic power-law flows calibrate exactly") {
    // Flow j alternates mu_j -/+ s_j around its mean, so the sample standard
    // deviation is s_j times a window-only constant; with s_j = 0.3 mu_j^0.75
    // the log-log slope is exactly 0.75 and the fit is perfect.
    const long J = 6, T = 40;
    Eigen::MatrixXd values(J, T);
    std::vector<std::string> labels;
    for (long j = 0; j < J; ++j) {
        const double mu = 100.0 * std::pow(2.0, static_cast<double>(j));
        const double s = 0.3 * std::pow(mu, 0.75);
        for (long t = 0; t < T; ++t) values(j, t) = mu + ((t % 2 == 0) ? -s : s);
        labels.push_back("f" + std::to_string(j + 1));
    }
    TraceSet flows;
    flows.values = values;
    flows.labels = labels;

    const GammaCalibration cal = gamma_regression(flows, T);
    REQUIRE(cal.window == T);
    REQUIRE(cal.gamma_hat == Catch::Approx(0.75).margin(1e-8));
    REQUIRE(cal.r_squared == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("synthetic traffic calibrates near its generating exponent") {
    const long J = 24, T = 3000;
    Eigen::VectorXd means(J);
    for (long j = 0; j < J; ++j)
        means[j] = 1000.0 * std::pow(30.0, static_cast<double>(j) / static_cast<double>(J - 1));
    std::vector<std::string> labels;
    for (long j = 0; j < J; ++j) labels.push_back("f" + std::to_string(j + 1));

    SynthesisSpec spec;
    spec.means = means;
    spec.sigma = 1.5;
    spec.gamma = 0.75;
    spec.hurst = 0.8;
    spec.length = T;
    spec.seed = 14;
    const TraceSet flows = synthesize_flows(spec, labels);

    const GammaCalibration cal = gamma_regression(flows, T);
    REQUIRE(cal.gamma_hat == Catch::Approx(0.75).margin(0.05));
    REQUIRE(cal.r_squared > 0.9);

    REQUIRE_THROWS_AS(gamma_regression(flows, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(gamma_regression(flows, T + 1), std::invalid_argument);
}

TEST_CASE("an unobserved copy of an observed link is predicted exactly") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const TraceSet flows = backbone_flows(routing, 400, 6);
    TraceSet links = route_traffic(routing, flows);
    links.values.row(12) = links.values.row(6);  // link 13 mirrors link 7

    ObservationScenario s;
    s.observed = {7, 3};
    s.unobserved = {13};
    ModelConfig config;
    config.window_m = 50;
    const PredictionRun run = run_scenario(links, nullptr, routing, s, Method::Simple, config);
    REQUIRE(run.remse < 1e-16);
    REQUIRE(run.predicted.rows() == 1);
    REQUIRE(run.predicted.cols() == 400 - 50);
    REQUIRE(run.actual.row(0) == links.values.row(12).tail(350));
}

TEST_CASE("every method beats predicting zero on the backbone") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const TraceSet flows = backbone_flows(routing, 360, 19);
    const TraceSet links = route_traffic(routing, flows);
    ModelConfig config;
    config.window_m = 60;

    for (Method method : {Method::Simple, Method::Ordinary, Method::NetworkSpecific}) {
        const PredictionRun run =
            run_scenario(links, &flows, routing, preset_scenario(6), method, config);
        // The covariance-aware methods track the link level closely; ordinary
        // kriging is biased when the observed links sit at different mean
        // levels, but still has to beat predicting zero.
        REQUIRE(run.remse < (method == Method::Ordinary ? 1.0 : 0.05));
        REQUIRE(run.method == method);
        // reruns are bitwise identical
        const PredictionRun again =
            run_scenario(links, &flows, routing, preset_scenario(6), method, config);
        REQUIRE(again.predicted == run.predicted);
        REQUIRE(again.remse == run.remse);
    }
}

TEST_CASE("scenario runner validates its inputs") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const TraceSet flows = backbone_flows(routing, 100, 2);
    const TraceSet links = route_traffic(routing, flows);
    ModelConfig config;
    config.window_m = 100;  // no bins left after warm-up
    REQUIRE_THROWS_AS(
        run_scenario(links, &flows, routing, preset_scenario(1), Method::Simple, config),
        std::invalid_argument);

    config.window_m = 50;
    REQUIRE_THROWS_AS(run_scenario(links, nullptr, routing, preset_scenario(1),
                                   Method::NetworkSpecific, config),
                      std::invalid_argument);

    const Eigen::MatrixXd bad_factors = Eigen::MatrixXd::Identity(10, 2);
    REQUIRE_THROWS_AS(run_scenario(links, nullptr, routing, preset_scenario(1),
                                   Method::NetworkSpecific, config, &bad_factors),
                      std::invalid_argument);

    REQUIRE_THROWS_AS(
        run_scenario(flows, nullptr, routing, preset_scenario(1), Method::Simple, config),
        std::invalid_argument);  // link-level traces required
}

TEST_CASE("factor mean presets are orthonormal and positive") {
    for (long J : {6L, 72L}) {
        const FactorMeans r1 = rank1_factor_means(J, 5000.0);
        REQUIRE(r1.F.cols() == 1);
        REQUIRE((r1.F.transpose() * r1.F).isApprox(Eigen::MatrixXd::Identity(1, 1), 1e-12));
        REQUIRE((r1.F * r1.beta).isApprox(r1.means, 1e-12));
        REQUIRE(r1.means.minCoeff() > 0.0);
        REQUIRE(r1.means.maxCoeff() == Catch::Approx(r1.means.minCoeff()));  // flat

        const FactorMeans r2 = rank2_factor_means(J, 5000.0);
        REQUIRE(r2.F.cols() == 2);
        REQUIRE((r2.F.transpose() * r2.F).isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
        REQUIRE((r2.F * r2.beta).isApprox(r2.means, 1e-12));
        REQUIRE(r2.means.minCoeff() > 0.0);
        REQUIRE(r2.means.maxCoeff() > r2.means.minCoeff());  // genuinely rank two
    }
}

TEST_CASE("sweep tabulates the grid and rejects fractional counts") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const TraceSet flows = backbone_flows(routing, 260, 4);
    const TraceSet links = route_traffic(routing, flows);
    ModelConfig config;
    config.window_m = 40;

    const SweepReport report = sweep(SweepParameter::Gamma, {0.5, 0.75}, {5, 6}, links, flows,
                                     routing, config);
    REQUIRE(report.grid == std::vector<double>{0.5, 0.75});
    REQUIRE(report.scenario_ids == std::vector<int>{5, 6});
    REQUIRE(report.remse_table.rows() == 2);
    REQUIRE(report.remse_table.cols() == 2);
    REQUIRE((report.remse_table.array() > 0.0).all());

    REQUIRE_THROWS_AS(
        sweep(SweepParameter::FactorCount, {1.5}, {5}, links, flows, routing, config),
        std::invalid_argument);
    REQUIRE_THROWS_AS(sweep(SweepParameter::Window, {0.0}, {5}, links, flows, routing, config),
                      std::invalid_argument);

    TempFile f("tmp_sweep_report.tsv");
    write_sweep_report(report, f.path);
    const std::string text = slurp(f.path);
    REQUIRE(text.find("parameter\tgamma") != std::string::npos);
    REQUIRE(text.find("scenario") != std::string::npos);
    write_sweep_report(report, f.path);
    REQUIRE(slurp(f.path) == text);
}

TEST_CASE("misspecification harness reports one error per window and regime") {
    MisspecOptions opts;
    opts.length = 600;
    opts.igls.min_iterations = 5;
    TrendSpec trend;
    trend.amplitude = 2000.0;
    trend.period = 100.0;

    const MisspecReport report = misspecification_experiment({5, 25}, trend, {1}, opts);
    REQUIRE(report.windows == std::vector<long>{5, 25});
    REQUIRE(report.model_stationary.size() == 2);
    REQUIRE(report.model_trend.size() == 2);
    REQUIRE(report.baseline_stationary > 0.0);
    REQUIRE(report.baseline_trend > 0.0);
    for (double v : report.model_stationary) REQUIRE(v > 0.0);
    for (double v : report.model_trend) REQUIRE(v > 0.0);
    // the oracle baseline knows the trend, so the trend costs it nothing much;
    // the fitted model cannot know it and pays on top of its stationary error
    REQUIRE(report.model_trend[1] > report.model_stationary[1]);

    TempFile f("tmp_misspec_report.tsv");
    write_misspec_report(report, f.path);
    const std::string text = slurp(f.path);
    REQUIRE(text.find("regime") != std::string::npos);
    REQUIRE(text.find("stationary") != std::string::npos);
    REQUIRE(text.find("trend") != std::string::npos);

    REQUIRE_THROWS_AS(misspecification_experiment({5}, trend, {}, opts), std::invalid_argument);
    REQUIRE_THROWS_AS(misspecification_experiment({}, trend, {1}, opts), std::invalid_argument);
}

TEST_CASE("an injected shift implicates its own flow") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    SynthesisSpec spec;
    spec.means = Eigen::VectorXd::Constant(72, 1000.0);
    spec.sigma = 1.0;
    spec.length = 1200;
    spec.seed = 33;
    const TraceSet flows = synthesize_flows(spec, routing.flow_labels);

    ChartConfig chart;
    chart.lambda = 0.1;
    AnomalyOptions options;
    options.onset = 600;

    const AnomalyReport report =
        anomaly_experiment(flows, routing, 20, 3000.0, {13}, chart, options);
    REQUIRE(report.charts.size() == 1);
    REQUIRE(report.charts[0].link == 13);
    REQUIRE_FALSE(report.charts[0].observed.empty());
    REQUIRE(report.charts[0].post_alarm_rate > 0.5);
    REQUIRE(report.charts[0].pre_alarm_rate < 0.2);
    REQUIRE(report.alarming_links == std::vector<int>{13});
    REQUIRE(std::find(report.implicated_flows.begin(), report.implicated_flows.end(), 20) !=
            report.implicated_flows.end());

    // without a shift nothing alarms persistently and nothing is implicated
    const AnomalyReport quiet = anomaly_experiment(flows, routing, 20, 0.0, {13}, chart, options);
    REQUIRE(quiet.alarming_links.empty());
    REQUIRE(quiet.implicated_flows.empty());

    // reruns identical
    const AnomalyReport again =
        anomaly_experiment(flows, routing, 20, 3000.0, {13}, chart, options);
    REQUIRE(again.charts[0].chart.alarms == report.charts[0].chart.alarms);

    AnomalyOptions early;
    early.onset = 100;  // not enough clean history
    REQUIRE_THROWS_AS(anomaly_experiment(flows, routing, 20, 100.0, {13}, chart, early),
                      std::invalid_argument);

    TempFile f("tmp_anomaly_summary.tsv");
    write_anomaly_summary(report, f.path);
    const std::string text = slurp(f.path);
    REQUIRE(text.find("link") != std::string::npos);
    REQUIRE(text.find("implicated_flows") != std::string::npos);
}

TEST_CASE("evaluation report lists scenarios by row and methods by column") {
    std::vector<PredictionRun> runs;
    PredictionRun a;
    a.method = Method::Simple;
    a.scenario_id = 6;
    a.scenario = preset_scenario(6);
    a.remse = 0.25;
    PredictionRun b = a;
    b.method = Method::NetworkSpecific;
    b.remse = 0.0625;
    PredictionRun c = a;
    c.scenario_id = 7;
    c.scenario = preset_scenario(7);
    c.remse = 0.5;
    runs = {a, b, c};

    TempFile f("tmp_eval_report.tsv");
    write_evaluate_report(runs, f.path);
    const std::string text = slurp(f.path);
    REQUIRE(text.find("scenario") != std::string::npos);
    REQUIRE(text.find("simple") != std::string::npos);
    REQUIRE(text.find("network-specific") != std::string::npos);
    REQUIRE(text.find("0.25") != std::string::npos);
    REQUIRE(text.find("0.0625") != std::string::npos);
    REQUIRE(text.find("-") != std::string::npos);  // scenario 7 has no network-specific run

    write_evaluate_report(runs, f.path);
    REQUIRE(slurp(f.path) == text);
}

TEST_CASE("a window that breaks the model fit falls back to the reference fit") {
    // Three links, two flows: link 1 carries flow 1, link 2 both, link 3 flow 2.
    RoutingMatrix routing;
    routing.A.resize(3, 2);
    routing.A << 1, 0,
                 1, 1,
                 0, 1;
    routing.link_ids = {1, 2, 3};
    routing.flow_labels = {"s1->d1", "s2->d2"};

    const long T = 40;
    const long m = 8;
    TraceSet links;
    links.kind = TraceSet::Kind::Link;
    links.labels = {"link_1", "link_2", "link_3"};
    links.values.resize(3, T);
    for (long t = 0; t < T; ++t) {
        const double f1 = 100.0 + 3.0 * std::sin(1.7 * static_cast<double>(t));
        const double f2 = 50.0 + 2.0 * std::cos(2.3 * static_cast<double>(t));
        links.values(0, t) = f1;
        links.values(1, t) = f1 + f2;
        links.values(2, t) = f2;
    }
    // With the identity factor basis and links {1,2} observed, the fitted
    // flow-2 mean is (window mean of link 2) - (window mean of link 1), so
    // dropping link 2 below link 1 over one stretch makes exactly the windows
    // inside that stretch abort on the positivity check.
    for (long t = 20; t <= 27; ++t) links.values(1, t) = links.values(0, t) - 5.0;

    const Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2, 2);
    ObservationScenario s;
    s.observed = {1, 2};
    s.unobserved = {3};
    ModelConfig config;
    config.window_m = m;

    const PredictionRun serial =
        run_scenario(links, nullptr, routing, s, Method::NetworkSpecific, config, &F);
    REQUIRE(serial.fallback_bins > 0);
    REQUIRE(serial.fallback_bins < T - m);  // most bins still fit on their own
    REQUIRE(std::isfinite(serial.remse));

    // The reference fit is chosen from the traces alone, so the parallel walk
    // lands on identical predictions bin for bin.
    const PredictionRun parallel = run_scenario(links, nullptr, routing, s,
                                                Method::NetworkSpecific, config, &F,
                                                Exec::Parallel);
    REQUIRE(parallel.fallback_bins == serial.fallback_bins);
    REQUIRE(parallel.predicted == serial.predicted);

    // When no window position fits at all, the failure propagates.
    TraceSet broken = links;
    for (long t = 0; t < T; ++t) broken.values(1, t) = broken.values(0, t) - 5.0;
    REQUIRE_THROWS_AS(
        run_scenario(broken, nullptr, routing, s, Method::NetworkSpecific, config, &F),
        numerical_error);
}
