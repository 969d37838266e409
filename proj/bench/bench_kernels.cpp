// Timing comparison of the serial and OpenMP execution paths for the two
// kernels that parallelize: trace synthesis (per-flow streams) and the
// rolling prediction loop (per-bin fits).  Results must be bitwise identical
// across paths; this binary asserts that before it prints timings.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "netkrig/graph.hpp"
#include "netkrig/harness.hpp"
#include "netkrig/traffic.hpp"

using namespace netkrig;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-24s %10.3fs %10.3fs %8.2fx\n", name, serial_s, parallel_s,
                serial_s / parallel_s);
}

}  // namespace

int main() {
    const Topology topo = internet2_topology();
    const RoutingMatrix routing = build_routing_matrix(topo);

    SynthesisSpec spec;
    spec.means = rank2_factor_means(routing.A.cols(), 8000.0).means;
    spec.sigma = 1.5;
    spec.hurst = 0.8;
    spec.length = 8192;
    spec.seed = 7;

    std::printf("%-24s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    auto t0 = clock_type::now();
    const TraceSet flows_serial = synthesize_flows(spec, routing.flow_labels, Exec::Serial);
    const double synth_serial = seconds_since(t0);

    t0 = clock_type::now();
    const TraceSet flows_parallel = synthesize_flows(spec, routing.flow_labels, Exec::Parallel);
    const double synth_parallel = seconds_since(t0);

    if (flows_serial.values != flows_parallel.values) {
        std::fprintf(stderr, "synthesis paths diverged\n");
        return 1;
    }
    report("synthesize_flows", synth_serial, synth_parallel);

    // Rolling prediction: trim the series so one pass stays in the seconds
    // range on a single core.
    TraceSet flows = flows_serial;
    flows.values = flows.values.leftCols(1500).eval();
    const TraceSet links = route_traffic(routing, flows);
    const ObservationScenario s = preset_scenario(8);
    ModelConfig config;

    t0 = clock_type::now();
    const PredictionRun run_serial =
        run_scenario(links, &flows, routing, s, Method::NetworkSpecific, config, nullptr,
                     Exec::Serial);
    const double scen_serial = seconds_since(t0);

    t0 = clock_type::now();
    const PredictionRun run_parallel =
        run_scenario(links, &flows, routing, s, Method::NetworkSpecific, config, nullptr,
                     Exec::Parallel);
    const double scen_parallel = seconds_since(t0);

    if (run_serial.predicted != run_parallel.predicted) {
        std::fprintf(stderr, "prediction paths diverged\n");
        return 1;
    }
    report("run_scenario", scen_serial, scen_parallel);
    return 0;
}
