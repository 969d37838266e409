// Command-line front end: each verb reads one flat key=value config file and
// writes delimited-text outputs.  Exit codes: 0 success, 1 usage or config
// problem, 2 numerical failure (the message names the failing operation).

#include <Eigen/Dense>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netkrig/chart.hpp"
#include "netkrig/common.hpp"
#include "netkrig/errors.hpp"
#include "netkrig/factors.hpp"
#include "netkrig/graph.hpp"
#include "netkrig/harness.hpp"
#include "netkrig/kriging.hpp"
#include "netkrig/model.hpp"
#include "netkrig/traffic.hpp"

namespace {

using namespace netkrig;

Config load_config(const std::string& path) {
    return Config(parse_config_file(path), path);
}

Topology load_topology(const Config& cfg) {
    if (cfg.has("topology_file")) return read_topology(cfg.get_string("topology_file"));
    return internet2_topology();
}

Eigen::VectorXd build_means(const Config& cfg, long flow_count) {
    const std::string structure = cfg.get_string_or("mean_structure", "rank2");
    if (structure == "list") {
        const std::vector<double> vals = cfg.get_double_list("means");
        if (static_cast<long>(vals.size()) != flow_count)
            throw config_error("means lists " + std::to_string(vals.size()) +
                               " entries but the topology has " + std::to_string(flow_count) +
                               " flows");
        Eigen::VectorXd mu(flow_count);
        for (long j = 0; j < flow_count; ++j) mu[j] = vals[static_cast<std::size_t>(j)];
        return mu;
    }
    const double scale = cfg.get_double_or("mean_scale", 8000.0);
    if (structure == "uniform") return Eigen::VectorXd::Constant(flow_count, scale);
    if (structure == "rank1") return rank1_factor_means(flow_count, scale).means;
    if (structure == "rank2") return rank2_factor_means(flow_count, scale).means;
    throw config_error("unknown mean_structure '" + structure +
                       "' (expected uniform, rank1, rank2, or list)");
}

// Generation keys shared by the verbs that can simulate their input traffic.
// `gamma_key` differs because evaluate/sweep reserve plain `gamma` for the
// model exponent.
SynthesisSpec build_synthesis(const Config& cfg, long flow_count, const std::string& gamma_key) {
    SynthesisSpec spec;
    spec.means = build_means(cfg, flow_count);
    spec.sigma = cfg.get_double_or("sigma", 1.0);
    spec.gamma = cfg.get_double_or(gamma_key, 0.75);
    spec.hurst = cfg.get_double_or("hurst", 0.8);
    spec.length = cfg.get_int_or("length", 2000);
    spec.bin_seconds = cfg.get_double_or("bin_seconds", 10.0);
    return spec;
}

ObservationScenario build_scenario(const Config& cfg) {
    const bool preset = cfg.has("scenario");
    const bool custom = cfg.has("observed") || cfg.has("unobserved");
    if (preset == custom)
        throw config_error(
            "give either scenario = <1..12> or both observed = and unobserved = link lists");
    if (preset) return preset_scenario(static_cast<int>(cfg.get_int("scenario")));
    ObservationScenario s;
    for (long id : cfg.get_int_list("observed")) s.observed.push_back(static_cast<int>(id));
    for (long id : cfg.get_int_list("unobserved")) s.unobserved.push_back(static_cast<int>(id));
    return s;
}

ModelConfig build_model_config(const Config& cfg) {
    ModelConfig mc;
    mc.p = cfg.get_int_or("p", 2);
    mc.gamma = cfg.get_double_or("gamma", 0.75);
    mc.window_m = cfg.get_int_or("m", 60);
    mc.factor_window = cfg.get_int_or("factor_window", 30);
    return mc;
}

std::vector<int> default_scenarios(int last) {
    std::vector<int> ids;
    for (int k = 1; k <= last; ++k) ids.push_back(k);
    return ids;
}

std::vector<int> scenario_list(const Config& cfg, int default_last) {
    if (!cfg.has("scenarios")) return default_scenarios(default_last);
    std::vector<int> ids;
    for (long id : cfg.get_int_list("scenarios")) ids.push_back(static_cast<int>(id));
    if (ids.empty()) throw config_error("scenarios list is empty");
    return ids;
}

int run_simulate(const std::string& config_path) {
    const Config cfg = load_config(config_path);
    const Topology topo = load_topology(cfg);
    const RoutingMatrix routing = build_routing_matrix(topo);

    SynthesisSpec spec = build_synthesis(cfg, routing.A.cols(), "gamma");
    spec.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));

    TraceSet flows = synthesize_flows(spec, routing.flow_labels);

    if (cfg.get_bool_or("trend", false)) {
        TrendSpec trend;
        // default: twice the average per-flow noise standard deviation
        const double noise_sd = spec.sigma * spec.means.array().pow(spec.gamma).mean();
        trend.amplitude = cfg.get_double_or("trend_amplitude", 2.0 * noise_sd);
        trend.period = cfg.get_double_or("trend_period", 100.0);
        trend.phase = cfg.get_double_or("trend_phase", 0.0);
        flows = add_trend(flows, trend);
    }
    if (cfg.has("anomaly_flow")) {
        AnomalySpec anomaly;
        anomaly.flow_index = cfg.get_int("anomaly_flow");
        anomaly.shift = cfg.get_double("anomaly_shift");
        anomaly.onset = cfg.get_int("anomaly_onset");
        flows = inject_mean_shift(flows, anomaly);
    }

    const bool want_flows = cfg.has("flows_out");
    const bool want_links = cfg.has("links_out");
    if (!want_flows && !want_links)
        throw config_error("nothing to write: set flows_out and/or links_out");
    std::string flows_out, links_out;
    if (want_flows) flows_out = cfg.get_string("flows_out");
    if (want_links) links_out = cfg.get_string("links_out");
    cfg.reject_unknown_keys();

    if (want_flows) write_traces(flows, flows_out);
    if (want_links) write_traces(route_traffic(routing, flows), links_out);
    std::cout << "simulated " << flows.series_count() << " flows x " << flows.length()
              << " bins\n";
    return 0;
}

int run_fit_factors(const std::string& config_path) {
    const Config cfg = load_config(config_path);
    const TraceSet flows = read_traces(cfg.get_string("flows_file"));
    const long p = cfg.get_int("p");
    const long w = cfg.get_int_or("window", 30);
    const std::string out_path = cfg.get_string("factors_out");
    cfg.reject_unknown_keys();

    if (flows.kind != TraceSet::Kind::Flow)
        throw std::invalid_argument("factor fitting needs flow-level traces");
    const FactorModel fm = fit_factor_matrix(window_means(flows.values, w), p);
    write_factor_matrix(fm, out_path);
    std::cout << "p = " << p << "\ncaptured_energy = " << format_double(energy_captured(fm, p))
              << '\n';
    return 0;
}

void write_predictions(const PredictionRun& run, long warm_up, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    out << "bin";
    for (int id : run.scenario.unobserved)
        out << "\tlink_" << id << "_predicted\tlink_" << id << "_actual";
    out << '\n';
    for (long c = 0; c < run.predicted.cols(); ++c) {
        out << (warm_up + c);
        for (long r = 0; r < run.predicted.rows(); ++r)
            out << '\t' << format_double(run.predicted(r, c)) << '\t'
                << format_double(run.actual(r, c));
        out << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

int run_predict(const std::string& config_path) {
    const Config cfg = load_config(config_path);
    const Topology topo = load_topology(cfg);
    const RoutingMatrix routing = build_routing_matrix(topo);

    const TraceSet links = read_traces(cfg.get_string("links_file"));
    const ObservationScenario s = build_scenario(cfg);
    const Method method = parse_method(cfg.get_string("method"));
    const ModelConfig mc = build_model_config(cfg);

    TraceSet flows;
    Eigen::MatrixXd factors;
    const TraceSet* flows_ptr = nullptr;
    const Eigen::MatrixXd* factors_ptr = nullptr;
    if (method == Method::NetworkSpecific) {
        if (cfg.has("factors_file")) {
            factors = read_factor_matrix(cfg.get_string("factors_file")).F;
            factors_ptr = &factors;
        } else if (cfg.has("flows_file")) {
            flows = read_traces(cfg.get_string("flows_file"));
            flows_ptr = &flows;
        } else {
            throw config_error("network-specific prediction needs flows_file or factors_file");
        }
    }

    const std::string predictions_out = cfg.get_string("predictions_out");
    std::string fit_out;
    if (cfg.has("fit_out")) {
        if (method != Method::NetworkSpecific)
            throw config_error("fit_out applies only to the network-specific method");
        fit_out = cfg.get_string("fit_out");
    }
    cfg.reject_unknown_keys();

    PredictionRun run = run_scenario(links, flows_ptr, routing, s, method, mc, factors_ptr);
    if (cfg.has("scenario")) run.scenario_id = static_cast<int>(cfg.get_int("scenario"));
    write_predictions(run, mc.window_m, predictions_out);

    if (!fit_out.empty()) {
        // record the model state at the final fitted bin
        const Eigen::MatrixXd F =
            factors_ptr ? *factors_ptr
                        : fit_factor_matrix(window_means(flows.values, mc.factor_window), mc.p).F;
        const ModelFit fit = fit_model(links.values, routing, s, F, mc.gamma,
                                       links.length() - 1, mc.window_m, mc.igls);
        write_model_fit(fit, cfg.get_string_or("factors_file", "<fitted from flows>"), fit_out);
    }

    std::cout << "remse = " << format_double(run.remse) << '\n';
    return 0;
}

int run_evaluate(const std::string& config_path) {
    const Config cfg = load_config(config_path);
    const Topology topo = load_topology(cfg);
    const RoutingMatrix routing = build_routing_matrix(topo);

    std::vector<Method> methods;
    for (const std::string& name : split(cfg.get_string_or("methods", "simple,ordinary,network-specific"), ','))
        methods.push_back(parse_method(trim(name)));
    if (methods.empty()) throw config_error("methods list is empty");
    const std::vector<int> scenarios = scenario_list(cfg, 12);
    const ModelConfig mc = build_model_config(cfg);
    const std::string report_out = cfg.get_string("report_out");

    const bool from_files = cfg.has("links_file");
    std::vector<PredictionRun> rows;

    if (from_files) {
        const TraceSet links = read_traces(cfg.get_string("links_file"));
        TraceSet flows;
        const TraceSet* flows_ptr = nullptr;
        if (cfg.has("flows_file")) {
            flows = read_traces(cfg.get_string("flows_file"));
            flows_ptr = &flows;
        }
        cfg.reject_unknown_keys();
        for (int id : scenarios) {
            const ObservationScenario s = preset_scenario(id);
            for (Method method : methods) {
                PredictionRun run = run_scenario(links, flows_ptr, routing, s, method, mc);
                run.scenario_id = id;
                run.predicted.resize(0, 0);  // the report keeps only the score
                run.actual.resize(0, 0);
                rows.push_back(std::move(run));
            }
        }
    } else {
        SynthesisSpec spec = build_synthesis(cfg, routing.A.cols(), "traffic_gamma");
        std::vector<long> seeds = cfg.has("seeds") ? cfg.get_int_list("seeds")
                                                   : std::vector<long>{1};
        if (seeds.empty()) throw config_error("seeds list is empty");
        cfg.reject_unknown_keys();

        Eigen::MatrixXd sums(static_cast<long>(scenarios.size()),
                             static_cast<long>(methods.size()));
        sums.setZero();
        for (long seed : seeds) {
            spec.seed = static_cast<std::uint64_t>(seed);
            const TraceSet flows = synthesize_flows(spec, routing.flow_labels);
            const TraceSet links = route_traffic(routing, flows);
            for (std::size_t si = 0; si < scenarios.size(); ++si) {
                const ObservationScenario s = preset_scenario(scenarios[si]);
                for (std::size_t mi = 0; mi < methods.size(); ++mi)
                    sums(static_cast<long>(si), static_cast<long>(mi)) +=
                        run_scenario(links, &flows, routing, s, methods[mi], mc).remse;
            }
        }
        for (std::size_t si = 0; si < scenarios.size(); ++si)
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                PredictionRun run;
                run.method = methods[mi];
                run.scenario_id = scenarios[si];
                run.scenario = preset_scenario(scenarios[si]);
                run.remse = sums(static_cast<long>(si), static_cast<long>(mi)) /
                            static_cast<double>(seeds.size());
                rows.push_back(std::move(run));
            }
    }

    write_evaluate_report(rows, report_out);
    std::cout << "wrote " << report_out << '\n';
    return 0;
}

int run_sweep(const std::string& config_path) {
    const Config cfg = load_config(config_path);
    const Topology topo = load_topology(cfg);
    const RoutingMatrix routing = build_routing_matrix(topo);

    const SweepParameter parameter = parse_sweep_parameter(cfg.get_string("parameter"));
    const std::vector<double> grid = cfg.get_double_list("grid");
    const std::vector<int> scenarios = scenario_list(cfg, 9);
    const ModelConfig mc = build_model_config(cfg);
    const std::string report_out = cfg.get_string("report_out");

    TraceSet flows, links;
    if (cfg.has("links_file")) {
        links = read_traces(cfg.get_string("links_file"));
        flows = read_traces(cfg.get_string("flows_file"));
        cfg.reject_unknown_keys();
    } else {
        SynthesisSpec spec = build_synthesis(cfg, routing.A.cols(), "traffic_gamma");
        spec.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
        cfg.reject_unknown_keys();
        flows = synthesize_flows(spec, routing.flow_labels);
        links = route_traffic(routing, flows);
    }

    const SweepReport report = sweep(parameter, grid, scenarios, links, flows, routing, mc);
    write_sweep_report(report, report_out);
    std::cout << "wrote " << report_out << '\n';
    return 0;
}

int run_chart_verb(const std::string& config_path) {
    const Config cfg = load_config(config_path);
    const Topology topo = load_topology(cfg);
    const RoutingMatrix routing = build_routing_matrix(topo);

    TraceSet flows;
    if (cfg.has("flows_file")) {
        flows = read_traces(cfg.get_string("flows_file"));
    } else {
        SynthesisSpec spec = build_synthesis(cfg, routing.A.cols(), "traffic_gamma");
        spec.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 1));
        flows = synthesize_flows(spec, routing.flow_labels);
    }

    const long flow_index = cfg.get_int("flow");
    const double shift = cfg.get_double("shift");
    AnomalyOptions options;
    options.onset = cfg.get_int("onset");
    options.alarm_fraction_threshold = cfg.get_double_or("alarm_threshold", 0.5);

    std::vector<int> monitored;
    for (long id : cfg.get_int_list("monitored_links")) monitored.push_back(static_cast<int>(id));

    ChartConfig chart_template;
    chart_template.lambda = cfg.get_double_or("lambda", 0.1);
    chart_template.limit_multiplier = cfg.get_double_or("c", 3.0);
    chart_template.lrd_adjusted = cfg.get_bool_or("lrd", true);
    chart_template.quadrature_tol = cfg.get_double_or("quadrature_tol", 1e-6);

    const std::string prefix = cfg.get_string("out_prefix");
    cfg.reject_unknown_keys();

    const AnomalyReport report = anomaly_experiment(flows, routing, flow_index, shift, monitored,
                                                    chart_template, options);
    for (const LinkChartRun& run : report.charts)
        write_chart(run.chart, prefix + "_link_" + std::to_string(run.link) + ".tsv");
    write_anomaly_summary(report, prefix + "_summary.tsv");

    std::cout << "implicated_flows =";
    if (report.implicated_flows.empty()) std::cout << " none";
    for (long j : report.implicated_flows) std::cout << ' ' << j;
    std::cout << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network link-load prediction and monitoring toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    auto add_verb = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "path to the key=value config file")->required();
        return sub;
    };
    CLI::App* sim = add_verb("simulate", "generate synthetic flow/link traces");
    CLI::App* fit = add_verb("fit-factors", "fit the low-rank mean basis from flow traces");
    CLI::App* pre = add_verb("predict", "predict unobserved links in one scenario");
    CLI::App* eva = add_verb("evaluate", "score every method across scenarios");
    CLI::App* swe = add_verb("sweep", "ReMSE across a calibration parameter grid");
    CLI::App* cha = add_verb("chart", "anomaly-injection control-chart experiment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed()) return run_simulate(config_path);
        if (fit->parsed()) return run_fit_factors(config_path);
        if (pre->parsed()) return run_predict(config_path);
        if (eva->parsed()) return run_evaluate(config_path);
        if (swe->parsed()) return run_sweep(config_path);
        if (cha->parsed()) return run_chart_verb(config_path);
        std::cerr << "no verb selected\n";
        return 1;
    } catch (const netkrig::numerical_error& e) {
        std::cerr << "numerical failure in " << e.operation() << ": " << e.what() << '\n';
        return 2;
    } catch (const netkrig::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
