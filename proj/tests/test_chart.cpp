#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "netkrig/chart.hpp"
#include "netkrig/common.hpp"
#include "netkrig/errors.hpp"
#include "netkrig/fgn.hpp"

using namespace netkrig;

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

}  // namespace

TEST_CASE("EWMA recursion by hand") {
    EwmaState state;
    state.lambda = 0.1;
    state = ewma_update(state, 1.0);
    REQUIRE(state.current == Catch::Approx(0.1).epsilon(1e-15));
    state = ewma_update(state, 0.0);
    REQUIRE(state.current == Catch::Approx(0.09).epsilon(1e-15));
    state = ewma_update(state, 0.0);
    REQUIRE(state.current == Catch::Approx(0.081).epsilon(1e-15));
    REQUIRE(state.initialized);
}

TEST_CASE("independent-observation EWMA variance") {
    REQUIRE(iid_ewma_variance(0.2, 1.0) == Catch::Approx(1.0 / 9.0).epsilon(1e-15));
    REQUIRE(iid_ewma_variance(1.0, 5.0) == Catch::Approx(5.0));
    REQUIRE(iid_ewma_variance(0.1, 2.0) == Catch::Approx(2.0 * 0.1 / 1.9).epsilon(1e-15));
    REQUIRE_THROWS_AS(iid_ewma_variance(0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(iid_ewma_variance(1.5, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(iid_ewma_variance(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("H = 1/2 reduces the adjusted variance to the independent one") {
    for (double lambda : {0.05, 0.1, 0.3, 0.5, 1.0}) {
        const double adjusted = lrd_ewma_variance(lambda, 1.7, 0.5);
        REQUIRE(adjusted == Catch::Approx(iid_ewma_variance(lambda, 1.7)).epsilon(1e-4));
    }
}

TEST_CASE("lambda = 1 charts the raw observations at any memory") {
    for (double hurst : {0.6, 0.75, 0.9}) {
        REQUIRE(lrd_ewma_variance(1.0, 3.0, hurst) == Catch::Approx(3.0).epsilon(1e-5));
    }
}

TEST_CASE("positive memory inflates the EWMA variance") {
    const double iid = iid_ewma_variance(0.1, 1.0);
    double previous = iid;
    for (double hurst : {0.6, 0.7, 0.8, 0.9}) {
        const double adjusted = lrd_ewma_variance(0.1, 1.0, hurst);
        REQUIRE(adjusted > previous);  // grows with the memory
        previous = adjusted;
    }
    REQUIRE(lrd_ewma_variance(0.1, 1.0, 0.6) > 1.05 * iid);
}

TEST_CASE("adjusted variance is exactly linear in power-of-two rescalings") {
    const double base = lrd_ewma_variance(0.1, 1.0, 0.8);
    REQUIRE(lrd_ewma_variance(0.1, 4.0, 0.8) == 4.0 * base);
    REQUIRE(lrd_ewma_variance(0.1, 0.25, 0.8) == 0.25 * base);
}

TEST_CASE("adjusted variance matches simulation") {
    const double lambda = 0.3, hurst = 0.7;
    const long n = 100000, burn = 2000;
    const std::vector<double> z = generate_fgn(hurst, 1.0, n, 40);
    EwmaState state;
    state.lambda = lambda;
    double sumsq = 0;
    long count = 0;
    for (long t = 0; t < n; ++t) {
        state = ewma_update(state, z[static_cast<std::size_t>(t)]);
        if (t >= burn) {
            sumsq += state.current * state.current;
            ++count;
        }
    }
    const double mc = sumsq / static_cast<double>(count);
    REQUIRE(mc == Catch::Approx(lrd_ewma_variance(lambda, 1.0, hurst)).epsilon(0.15));
}

TEST_CASE("variance inputs are validated") {
    REQUIRE_THROWS_AS(lrd_ewma_variance(0.1, 1.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(lrd_ewma_variance(0.1, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(lrd_ewma_variance(0.0, 1.0, 0.8), std::invalid_argument);
    REQUIRE_THROWS_AS(lrd_ewma_variance(0.1, -2.0, 0.8), std::invalid_argument);
}

TEST_CASE("memory estimate brackets the truth on synthetic series") {
    const long n = 16384;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const Eigen::VectorXd white = to_vector(generate_fgn(0.5, 1.0, n, seed));
        bool clamped = true;
        const double h_white = estimate_hurst(white, &clamped);
        REQUIRE_FALSE(clamped);
        REQUIRE(h_white > 0.4);
        REQUIRE(h_white < 0.6);

        const std::vector<double> persistent = generate_fgn(0.8, 1.0, n, seed + 100);
        const double h_long = estimate_hurst(to_vector(persistent));
        REQUIRE(h_long > 0.68);
        REQUIRE(h_long < 0.92);

        // shuffling destroys the dependence, not the marginals
        std::vector<double> shuffled = persistent;
        std::uint64_t state = 999 + seed;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            const std::size_t k = static_cast<std::size_t>(splitmix64(state) % i);
            std::swap(shuffled[i - 1], shuffled[k]);
        }
        const double h_shuffled = estimate_hurst(to_vector(shuffled));
        REQUIRE(h_shuffled > 0.4);
        REQUIRE(h_shuffled < 0.6);
        REQUIRE(h_long > h_shuffled);
    }
}

TEST_CASE("memory estimate clamps on a deterministic ramp") {
    Eigen::VectorXd ramp(2048);
    for (long t = 0; t < ramp.size(); ++t) ramp[t] = static_cast<double>(t);
    bool clamped = false;
    const double h = estimate_hurst(ramp, &clamped);
    REQUIRE(clamped);
    REQUIRE(h == Catch::Approx(0.99));
}

TEST_CASE("memory estimate rejects degenerate input") {
    REQUIRE_THROWS_AS(estimate_hurst(Eigen::VectorXd::Zero(100)), std::invalid_argument);
    REQUIRE_THROWS_AS(estimate_hurst(Eigen::VectorXd::Ones(4096)), std::invalid_argument);
}

TEST_CASE("quiet residuals never alarm") {
    ChartConfig config;
    config.sigma2 = 1.0;
    config.lrd_adjusted = false;
    const ChartResult result = run_chart(Eigen::VectorXd::Zero(500), config);
    REQUIRE(result.statistic.size() == 500);
    REQUIRE(result.alarms.size() == 500);
    REQUIRE(result.limit > 0.0);
    for (long t = 0; t < 500; ++t) {
        REQUIRE(result.statistic[t] == 0.0);
        REQUIRE_FALSE(result.alarms[t]);
    }
    REQUIRE_FALSE(result.onset_marker.has_value());
}

TEST_CASE("alarm flags restate the limit comparison") {
    ChartConfig config;
    config.lambda = 0.2;
    config.sigma2 = 1.0;
    config.hurst = 0.8;
    config.lrd_adjusted = true;
    const Eigen::VectorXd z = to_vector(generate_fgn(0.8, 1.0, 4000, 77));
    const ChartResult result = run_chart(z, config);
    bool any = false;
    for (long t = 0; t < z.size(); ++t) {
        REQUIRE(result.alarms[static_cast<std::size_t>(t)] ==
                (std::abs(result.statistic[t]) > result.limit));
        any = any || result.alarms[static_cast<std::size_t>(t)];
    }
    (void)any;

    // the LRD limit is wider than the iid one, so it alarms no more often
    ChartConfig naive = config;
    naive.lrd_adjusted = false;
    const ChartResult raw = run_chart(z, naive);
    long lrd_alarms = 0, iid_alarms = 0;
    for (std::size_t t = 0; t < result.alarms.size(); ++t) {
        lrd_alarms += result.alarms[t] ? 1 : 0;
        iid_alarms += raw.alarms[t] ? 1 : 0;
    }
    REQUIRE(lrd_alarms <= iid_alarms);
    REQUIRE(result.statistic == raw.statistic);  // only the limit moves
}

TEST_CASE("joint power-of-two rescaling leaves the alarms untouched") {
    ChartConfig config;
    config.lambda = 0.1;
    config.sigma2 = 1.0;
    config.hurst = 0.7;
    const Eigen::VectorXd z = to_vector(generate_fgn(0.7, 1.0, 2000, 13));
    const ChartResult base = run_chart(z, config);

    ChartConfig scaled_config = config;
    scaled_config.sigma2 = 4.0;
    const ChartResult scaled = run_chart(2.0 * z, scaled_config);
    REQUIRE(scaled.alarms == base.alarms);
    REQUIRE(scaled.limit == 2.0 * base.limit);
    for (long t = 0; t < z.size(); ++t)
        REQUIRE(scaled.statistic[t] == 2.0 * base.statistic[t]);
}

TEST_CASE("chart configuration is validated") {
    ChartConfig config;
    config.sigma2 = 0.0;
    REQUIRE_THROWS_AS(run_chart(Eigen::VectorXd::Zero(10), config), std::invalid_argument);
    config.sigma2 = 1.0;
    config.limit_multiplier = 0.0;
    REQUIRE_THROWS_AS(run_chart(Eigen::VectorXd::Zero(10), config), std::invalid_argument);
    config.limit_multiplier = 3.0;
    config.hurst = 1.2;
    config.lrd_adjusted = true;
    REQUIRE_THROWS_AS(run_chart(Eigen::VectorXd::Zero(10), config), std::invalid_argument);
}
