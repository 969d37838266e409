#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "netkrig/common.hpp"
#include "netkrig/graph.hpp"

namespace netkrig {

// Time-indexed traffic volumes: one row per series (flow or link), one
// column per time bin.
struct TraceSet {
    enum class Kind { Flow, Link };

    Eigen::MatrixXd values;           // series x bins, bytes per bin
    std::vector<std::string> labels;  // per series; flows "src->dst", links "link_<id>"
    double bin_seconds = 10.0;
    Kind kind = Kind::Flow;

    long series_count() const { return values.rows(); }
    long length() const { return values.cols(); }
};

struct SynthesisSpec {
    Eigen::VectorXd means;   // per-flow mean, strictly positive
    double sigma = 1.0;      // noise scale: flow j std dev = sigma * means[j]^gamma
    double gamma = 0.75;     // mean-variance exponent
    double hurst = 0.8;
    long length = 1000;
    std::uint64_t seed = 1;
    double bin_seconds = 10.0;
};

// Flow j = means[j] + sigma*means[j]^gamma * (unit-variance fGn), flows
// mutually independent with per-flow derived seeds, so results are identical
// for any execution policy and thread count.
TraceSet synthesize_flows(const SynthesisSpec& spec, const std::vector<std::string>& labels,
                          Exec exec = Exec::Serial);

struct TrendSpec {
    double amplitude = 0;  // bytes per bin, >= 0
    double period = 100;   // bins, > 0
    double phase = 0;      // radians
};

// Adds amplitude*sin(2*pi*t/period + phase) to every series, t = bin index.
TraceSet add_trend(const TraceSet& flows, const TrendSpec& trend);

struct AnomalySpec {
    long flow_index = 1;  // 1-based series index
    long onset = 0;       // first affected bin
    double shift = 0;     // additive mean change, bytes per bin
};

TraceSet inject_mean_shift(const TraceSet& flows, const AnomalySpec& anomaly);

// Y(t) = A X(t); labels become "link_<id>".
TraceSet route_traffic(const RoutingMatrix& routing, const TraceSet& flows);

// Trace files are tab-separated: header "bin" then one label per series,
// rows are the bin index followed by the per-series values.
void write_traces(const TraceSet& traces, const std::string& path);
TraceSet read_traces(const std::string& path, double bin_seconds = 10.0);

}  // namespace netkrig
