#include "netkrig/traffic.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "netkrig/errors.hpp"
#include "netkrig/fgn.hpp"

namespace netkrig {

TraceSet synthesize_flows(const SynthesisSpec& spec, const std::vector<std::string>& labels,
                          Exec exec) {
    const long J = spec.means.size();
    if (J < 1) throw std::invalid_argument("no flows to synthesize");
    if (static_cast<long>(labels.size()) != J)
        throw std::invalid_argument("label count does not match flow count");
    if (spec.means.minCoeff() <= 0)
        throw std::invalid_argument("flow means must be strictly positive");
    if (spec.sigma < 0) throw std::invalid_argument("sigma must be nonnegative");
    if (spec.gamma < 0) throw std::invalid_argument("gamma must be nonnegative");
    if (spec.length < 1) throw std::invalid_argument("trace length must be >= 1");

    TraceSet out;
    out.values.resize(J, spec.length);
    out.labels = labels;
    out.bin_seconds = spec.bin_seconds;
    out.kind = TraceSet::Kind::Flow;

    if (spec.sigma == 0) {
        for (long j = 0; j < J; ++j) out.values.row(j).setConstant(spec.means[j]);
        return out;
    }

    const FgnGenerator gen(spec.hurst, spec.length);
    auto fill_row = [&](long j) {
        std::vector<double> z = gen.sample(derive_seed(spec.seed, static_cast<std::uint64_t>(j)));
        const double scale = spec.sigma * std::pow(spec.means[j], spec.gamma);
        for (long t = 0; t < spec.length; ++t) out.values(j, t) = spec.means[j] + scale * z[t];
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long j = 0; j < J; ++j) fill_row(j);
    } else {
        for (long j = 0; j < J; ++j) fill_row(j);
    }
    return out;
}

TraceSet add_trend(const TraceSet& flows, const TrendSpec& trend) {
    if (flows.kind != TraceSet::Kind::Flow)
        throw std::invalid_argument("trend applies to flow-level traces");
    if (trend.amplitude < 0) throw std::invalid_argument("trend amplitude must be >= 0");
    if (trend.period <= 0) throw std::invalid_argument("trend period must be positive");
    TraceSet out = flows;
    for (long t = 0; t < out.length(); ++t) {
        const double v =
            trend.amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) / trend.period +
                                       trend.phase);
        out.values.col(t).array() += v;
    }
    return out;
}

TraceSet inject_mean_shift(const TraceSet& flows, const AnomalySpec& anomaly) {
    if (anomaly.flow_index < 1 || anomaly.flow_index > flows.series_count())
        throw std::invalid_argument("anomaly flow index " + std::to_string(anomaly.flow_index) +
                                    " outside 1.." + std::to_string(flows.series_count()));
    if (anomaly.onset < 0 || anomaly.onset >= flows.length())
        throw std::invalid_argument("anomaly onset " + std::to_string(anomaly.onset) +
                                    " outside trace length " + std::to_string(flows.length()));
    TraceSet out = flows;
    out.values.row(anomaly.flow_index - 1)
        .segment(anomaly.onset, out.length() - anomaly.onset)
        .array() += anomaly.shift;
    return out;
}

TraceSet route_traffic(const RoutingMatrix& routing, const TraceSet& flows) {
    if (flows.kind != TraceSet::Kind::Flow)
        throw std::invalid_argument("route_traffic expects flow-level traces");
    if (flows.series_count() != routing.A.cols())
        throw std::invalid_argument("flow count " + std::to_string(flows.series_count()) +
                                    " does not match routing matrix columns " +
                                    std::to_string(routing.A.cols()));
    TraceSet out;
    out.values = routing.A * flows.values;
    out.labels.reserve(routing.link_ids.size());
    for (int id : routing.link_ids) out.labels.push_back("link_" + std::to_string(id));
    out.bin_seconds = flows.bin_seconds;
    out.kind = TraceSet::Kind::Link;
    return out;
}

void write_traces(const TraceSet& traces, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    out << "bin";
    for (const auto& label : traces.labels) out << '\t' << label;
    out << '\n';
    for (long t = 0; t < traces.length(); ++t) {
        out << t;
        for (long s = 0; s < traces.series_count(); ++s)
            out << '\t' << format_double(traces.values(s, t));
        out << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

TraceSet read_traces(const std::string& path, double bin_seconds) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open trace file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw config_error(path + ": empty file");
    auto header = split(line, '\t');
    if (header.size() < 2 || trim(header[0]) != "bin")
        throw config_error(path + ": header must start with 'bin' and list series labels");

    TraceSet traces;
    traces.bin_seconds = bin_seconds;
    bool any_flow = false, any_link = false;
    for (std::size_t i = 1; i < header.size(); ++i) {
        std::string label = trim(header[i]);
        if (label.find("->") != std::string::npos)
            any_flow = true;
        else if (label.rfind("link_", 0) == 0)
            any_link = true;
        else
            throw config_error(path + ": label '" + label +
                               "' is neither a flow ('src->dst') nor a link ('link_<id>')");
        traces.labels.push_back(std::move(label));
    }
    if (any_flow && any_link)
        throw config_error(path + ": mixes flow and link series in one file");
    traces.kind = any_link ? TraceSet::Kind::Link : TraceSet::Kind::Flow;

    const std::size_t S = traces.labels.size();
    std::vector<std::vector<double>> cols;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != S + 1)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(S + 1) + " fields, got " +
                               std::to_string(fields.size()));
        long bin = 0;
        try {
            bin = std::stol(trim(fields[0]));
        } catch (const std::exception&) {
            throw config_error(path + ":" + std::to_string(lineno) + ": malformed bin index");
        }
        if (bin != static_cast<long>(cols.size()))
            throw config_error(path + ":" + std::to_string(lineno) + ": bin index " +
                               std::to_string(bin) + " out of order (expected " +
                               std::to_string(cols.size()) + ")");
        std::vector<double> col(S);
        for (std::size_t s = 0; s < S; ++s) {
            try {
                col[s] = std::stod(trim(fields[s + 1]));
            } catch (const std::exception&) {
                throw config_error(path + ":" + std::to_string(lineno) + ": malformed value '" +
                                   fields[s + 1] + "'");
            }
        }
        cols.push_back(std::move(col));
    }
    if (cols.empty()) throw config_error(path + ": no data rows");
    traces.values.resize(S, cols.size());
    for (std::size_t t = 0; t < cols.size(); ++t)
        for (std::size_t s = 0; s < S; ++s) traces.values(s, t) = cols[t][s];
    return traces;
}

}  // namespace netkrig
