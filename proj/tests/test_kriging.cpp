#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "netkrig/fgn.hpp"
#include "netkrig/graph.hpp"
#include "netkrig/kriging.hpp"
#include "netkrig/traffic.hpp"

using namespace netkrig;

namespace {

// Fresh flow traffic on the bundled backbone.
TraceSet backbone_links(const RoutingMatrix& routing, long length, std::uint64_t seed,
                        double sigma = 1.0) {
    SynthesisSpec spec;
    spec.means = Eigen::VectorXd::Constant(72, 1000.0);
    spec.sigma = sigma;
    spec.length = length;
    spec.seed = seed;
    return route_traffic(routing, synthesize_flows(spec, routing.flow_labels));
}

}  // namespace

TEST_CASE("two-bin window moments by hand") {
    Eigen::MatrixXd values(2, 4);
    values << 1, 3, 5, 7,
              2, 2, 8, 4;
    // bins 1 and 2 (the two strictly before t0 = 3)
    const MomentEstimate m = windowed_moments(values, 3, 2);
    REQUIRE(m.window == 2);
    REQUIRE(m.at_time == 3);
    REQUIRE(m.mean[0] == Catch::Approx(4.0));
    REQUIRE(m.mean[1] == Catch::Approx(5.0));
    // divisor m-1 = 1: cov = (x1-mean)(x1-mean)^t + (x2-mean)(x2-mean)^t over 1
    REQUIRE(m.covariance(0, 0) == Catch::Approx(2.0));
    REQUIRE(m.covariance(1, 1) == Catch::Approx(18.0));
    REQUIRE(m.covariance(0, 1) == Catch::Approx(6.0));
    REQUIRE(m.covariance(1, 0) == Catch::Approx(6.0));
}

TEST_CASE("windowed moments validate the window placement") {
    const Eigen::MatrixXd values = Eigen::MatrixXd::Zero(2, 10);
    REQUIRE_THROWS_AS(windowed_moments(values, 1, 2), std::invalid_argument);   // would start at -1
    REQUIRE_THROWS_AS(windowed_moments(values, 11, 2), std::invalid_argument);  // past the end
    REQUIRE_THROWS_AS(windowed_moments(values, 5, 1), std::invalid_argument);   // m must be >= 2
    REQUIRE_NOTHROW(windowed_moments(values, 10, 10));
}

TEST_CASE("bivariate normal regression coefficient") {
    // With exact moments, predicting series 2 from series 1 uses the slope
    // cov/var; check the empirical version converges to rho on correlated
    // synthetic data built from shared fGn.
    const long n = 6000;
    const std::vector<double> base = generate_fgn(0.5, 1.0, n, 5);
    const std::vector<double> extra = generate_fgn(0.5, 1.0, n, 6);
    const double rho = 0.6;
    Eigen::MatrixXd values(2, n);
    for (long t = 0; t < n; ++t) {
        values(0, t) = base[static_cast<std::size_t>(t)];
        values(1, t) = rho * base[static_cast<std::size_t>(t)] +
                       std::sqrt(1 - rho * rho) * extra[static_cast<std::size_t>(t)];
    }
    const MomentEstimate m = windowed_moments(values, n, n);
    REQUIRE(m.covariance(0, 1) == Catch::Approx(rho).margin(0.05));

    // Treat series as links 1 (observed) and 2 (unobserved).
    ObservationScenario s{{1}, {2}};
    Eigen::VectorXd y_o(1);
    y_o << m.mean[0] + 1.0;
    const KrigingPrediction pred = simple_krige(m, y_o, s);
    const double slope = m.covariance(1, 0) / m.covariance(0, 0);
    REQUIRE(pred.predicted[0] == Catch::Approx(m.mean[1] + slope * 1.0).epsilon(1e-12));
    const double resid_var = m.covariance(1, 1) - slope * m.covariance(0, 1);
    REQUIRE(pred.error_covariance(0, 0) == Catch::Approx(resid_var).epsilon(1e-12));
    REQUIRE(pred.error_covariance(0, 0) == Catch::Approx(1 - rho * rho).margin(0.05));
}

TEST_CASE("duplicated series predicts itself exactly") {
    // If an unobserved link carries exactly the traffic of an observed one,
    // the BLUP reproduces the observation with zero error variance.
    const long n = 300;
    const std::vector<double> base = generate_fgn(0.8, 1.0, n, 17);
    const std::vector<double> extra = generate_fgn(0.8, 1.0, n, 18);
    Eigen::MatrixXd values(3, n);
    for (long t = 0; t < n; ++t) {
        const double x = 100.0 + base[static_cast<std::size_t>(t)];
        const double y =
            40.0 + 0.25 * base[static_cast<std::size_t>(t)] + 0.5 * extra[static_cast<std::size_t>(t)];
        values(0, t) = x;
        values(1, t) = y;
        values(2, t) = x;  // link 3 duplicates link 1
    }
    const MomentEstimate m = windowed_moments(values, n, n);
    ObservationScenario s{{1, 2}, {3}};
    Eigen::VectorXd y_o(2);
    y_o << values(0, n - 1), values(1, n - 1);
    const KrigingPrediction pred = simple_krige(m, y_o, s);
    REQUIRE(pred.predicted[0] == Catch::Approx(values(2, n - 1)).epsilon(1e-8));
    REQUIRE(pred.error_covariance(0, 0) == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("simple kriging beats the unconditional mean on the backbone") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const TraceSet links = backbone_links(routing, 1200, 23);
    const ObservationScenario s = preset_scenario(8);

    const long t0 = 1000;
    const MomentEstimate m = windowed_moments(links, t0, 1000);
    double se_krige = 0, se_mean = 0;
    for (long t = t0; t < links.length(); ++t) {
        Eigen::VectorXd y_o(static_cast<long>(s.observed.size()));
        for (std::size_t i = 0; i < s.observed.size(); ++i)
            y_o[static_cast<long>(i)] = links.values(s.observed[i] - 1, t);
        const KrigingPrediction pred = simple_krige(m, y_o, s);
        const double actual = links.values(s.unobserved[0] - 1, t);
        se_krige += (pred.predicted[0] - actual) * (pred.predicted[0] - actual);
        se_mean += (m.mean[s.unobserved[0] - 1] - actual) * (m.mean[s.unobserved[0] - 1] - actual);
    }
    REQUIRE(se_krige < 0.8 * se_mean);
}

TEST_CASE("route-overlap scale estimate is exact on its own model") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const ObservationScenario s = preset_scenario(8);
    Eigen::MatrixXd A_o(static_cast<long>(s.observed.size()), 72);
    for (std::size_t i = 0; i < s.observed.size(); ++i)
        A_o.row(static_cast<long>(i)) = routing.A.row(s.observed[i] - 1);

    const Eigen::MatrixXd pattern = A_o * A_o.transpose();
    REQUIRE(estimate_sigma_x(3.75 * pattern, A_o) == Catch::Approx(3.75).epsilon(1e-12));

    // scale equivariance
    const Eigen::MatrixXd noisy =
        3.75 * pattern + Eigen::MatrixXd::Constant(pattern.rows(), pattern.cols(), 0.01);
    const double base = estimate_sigma_x(noisy, A_o);
    REQUIRE(estimate_sigma_x(16.0 * noisy, A_o) == Catch::Approx(16.0 * base).epsilon(1e-12));
}

TEST_CASE("ordinary kriging weights sum to one") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    for (int k : {1, 5, 8, 12}) {
        const ObservationScenario s = preset_scenario(k);
        Eigen::VectorXd y_o =
            Eigen::VectorXd::LinSpaced(static_cast<long>(s.observed.size()), 900.0, 1700.0);
        const OrdinaryKrigeResult result = ordinary_krige(routing, s, 2.0, y_o);
        REQUIRE(result.weights.rows() == static_cast<long>(s.observed.size()));
        REQUIRE(result.weights.cols() == static_cast<long>(s.unobserved.size()));
        for (long c = 0; c < result.weights.cols(); ++c)
            REQUIRE(result.weights.col(c).sum() == Catch::Approx(1.0).epsilon(1e-10));
        REQUIRE(result.predicted.size() == static_cast<long>(s.unobserved.size()));
    }
}

TEST_CASE("ordinary kriging predictions ignore the variogram scale") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const ObservationScenario s = preset_scenario(8);
    Eigen::VectorXd y_o =
        Eigen::VectorXd::LinSpaced(static_cast<long>(s.observed.size()), 500.0, 800.0);
    const OrdinaryKrigeResult a = ordinary_krige(routing, s, 1.0, y_o);
    const OrdinaryKrigeResult b = ordinary_krige(routing, s, 64.0, y_o);
    REQUIRE(a.predicted.isApprox(b.predicted, 1e-10));
    // the kriging variance does scale
    REQUIRE(b.error_covariance(0, 0) ==
            Catch::Approx(64.0 * a.error_covariance(0, 0)).epsilon(1e-8));
}

TEST_CASE("three-node ordinary kriging worked by hand") {
    // Metric 10 on the direct a-c circuit pushes a<->c over b, so links 1
    // (a->b) and 3 (b->c) both carry flow a->c alongside their own pair
    // traffic while link 2 (b->a) shares flows with neither.
    Topology topo;
    topo.nodes = {"a", "b", "c"};
    topo.links = {{1, "a", "b", 1e9, 1.0}, {2, "b", "a", 1e9, 1.0},
                  {3, "b", "c", 1e9, 1.0}, {4, "c", "b", 1e9, 1.0},
                  {5, "a", "c", 1e9, 10.0}, {6, "c", "a", 1e9, 10.0}};
    const RoutingMatrix routing = build_routing_matrix(topo);
    REQUIRE(routing.A.cols() == 6);
    // AA^t: diagonal 2 for links 1,2,3; overlap(1,3) = 1 (flow a->c), all
    // other observed/unobserved overlaps zero.  Predicting link 2 from
    // {1,3}: symmetry forces weights (1/2, 1/2), multiplier 3/2 on the
    // semivariogram scale, prediction (y1+y3)/2 and kriging variance 3.5.
    const ObservationScenario s{{1, 3}, {2}};
    Eigen::VectorXd y_o(2);
    y_o << 10.0, 20.0;
    const OrdinaryKrigeResult result = ordinary_krige(routing, s, 1.0, y_o);
    REQUIRE(result.weights(0, 0) == Catch::Approx(0.5).epsilon(1e-10));
    REQUIRE(result.weights(1, 0) == Catch::Approx(0.5).epsilon(1e-10));
    REQUIRE(result.predicted[0] == Catch::Approx(15.0).epsilon(1e-10));
    REQUIRE(result.error_covariance(0, 0) == Catch::Approx(3.5).epsilon(1e-10));

    // doubling sigma_x2 doubles the variance, not the prediction
    const OrdinaryKrigeResult doubled = ordinary_krige(routing, s, 2.0, y_o);
    REQUIRE(doubled.predicted[0] == Catch::Approx(15.0).epsilon(1e-10));
    REQUIRE(doubled.error_covariance(0, 0) == Catch::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("kriging rejects mismatched inputs") {
    const RoutingMatrix routing = build_routing_matrix(internet2_topology());
    const TraceSet links = backbone_links(routing, 80, 31);
    const MomentEstimate m = windowed_moments(links, 60, 40);
    const ObservationScenario s = preset_scenario(1);
    Eigen::VectorXd wrong(3);  // scenario 1 observes two links
    wrong.setZero();
    REQUIRE_THROWS_AS(simple_krige(m, wrong, s), std::invalid_argument);
    REQUIRE_THROWS_AS(ordinary_krige(routing, s, -1.0, wrong), std::invalid_argument);
}
