#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wavecig/wavecig.hpp>

using namespace wavecig;

namespace {

struct Output {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw DataError("cannot write '" + path + "'");
        stream = &file;
    }
    std::ostream& operator*() { return *stream; }
};

NamedSeries load_series(const std::string& path) {
    if (path.empty() || path == "-") return parse_csv(std::cin, "stdin");
    return read_csv(path);
}

/// key=value lines turned into "--key=value" arguments.
std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        args.push_back("--" + detail::trim(line.substr(0, eq)) + "=" + detail::trim(line.substr(eq + 1)));
    }
    return args;
}

/// Splices the settings of `--config <file>` in front of the subcommand flags
/// so that later command-line flags take precedence. `benchmark` reads its
/// own scenario config and is left alone.
std::vector<std::string> expand_config(const std::vector<std::string>& argv) {
    if (argv.size() < 2 || argv[1] == "benchmark") return argv;
    std::string path;
    for (std::size_t i = 2; i < argv.size(); ++i) {
        if (argv[i] == "--config" && i + 1 < argv.size()) path = argv[i + 1];
        else if (argv[i].rfind("--config=", 0) == 0) path = argv[i].substr(9);
    }
    if (path.empty()) return argv;
    std::vector<std::string> out(argv.begin(), argv.begin() + 2);
    for (auto& a : config_arguments(path)) out.push_back(std::move(a));
    out.insert(out.end(), argv.begin() + 2, argv.end());
    return out;
}

struct SimulateArgs {
    std::string kind = "gnar";
    std::string graph = "ring:10";
    int nodes = 10;
    double alpha = 0.0;
    double beta = 0.85;
    double beta_lo = 0.6;
    double beta_hi = 0.7;
    Index length = 1024;
    std::uint64_t seed = 1;
    int burn_in = kDefaultBurnIn;
    std::string out;
    std::string truth;
};

int run_simulate(const SimulateArgs& a) {
    VarmaModel model;
    Graph truth;
    if (a.kind == "gnar") {
        const GnarModel g = gnar_1_1(parse_graph_spec(a.graph), a.beta, a.alpha);
        model = g.as_var();
        truth = true_cig_gnar(g.graph, g.stages);
    } else {
        if (a.kind == "var_ring") model = ring_var_model(a.nodes, a.beta_lo, a.beta_hi, a.seed);
        else if (a.kind == "var_noise_precision") model = noise_precision_var_model(a.nodes, a.seed);
        else if (a.kind == "varma_block") {
            if (a.nodes % 5 != 0) throw ConfigError("block VARMA needs a node count divisible by 5");
            model = block_varma_model(a.nodes / 5, 5);
        } else if (a.kind == "white_noise") model = {{}, {}, Matrix::Identity(a.nodes, a.nodes)};
        else throw ConfigError("unknown kind '" + a.kind + "'");
        truth = spectral_oracle_var(model).graph;
    }
    NamedSeries s{default_names(model.channels()), simulate_varma(model, a.length, a.seed, a.burn_in)};
    Output out(a.out);
    write_csv(*out, s);
    if (!a.truth.empty()) write_graph_json(a.truth, {s.names, truth, {"truth:" + a.kind, {}, {}}});
    return 0;
}

struct EstimateArgs {
    std::string in;
    std::string method = "wavelet";
    int bootstraps = 50;
    std::string criterion = "ebic";
    double gamma = 0.5;
    std::string wavelet = "haar";
    std::uint64_t seed = 1;
    int half_window = 0;
    std::string fourier_criterion = "bic";
    int arity = 2;
    std::string scale = "finest";
    std::string out;
};

WavTsGlassoConfig wavelet_settings(const EstimateArgs& a) {
    WavTsGlassoConfig c;
    c.wavelet = WaveletSpec::parse(a.wavelet);
    c.bootstraps = a.bootstraps;
    c.criterion = parse_criterion(a.criterion);
    c.gamma = a.gamma;
    c.arity = a.arity;
    c.seeds = RngSeedPlan{a.seed};
    return c;
}

std::vector<double> lambdas(const std::vector<PrecisionEstimate>& est) {
    std::vector<double> out;
    for (const auto& e : est) out.push_back(e.lambda);
    return out;
}

int run_estimate(const EstimateArgs& a) {
    const NamedSeries s = load_series(a.in);
    NamedGraph g;
    g.nodes = s.names;
    if (a.method == "wavelet") {
        const auto r = wav_ts_glasso(s.data, wavelet_settings(a));
        g.graph = r.graph;
        g.meta = {"wavelet", r.selection.scales, lambdas(r.estimates)};
    } else if (a.method == "fourier") {
        FourierConfig c;
        c.half_window = a.half_window;
        c.criterion = parse_criterion(a.fourier_criterion);
        c.gamma = a.gamma;
        const auto r = fourier_ts_glasso(s.data, c);
        g.graph = r.graph;
        g.meta = {"fourier", {}, {r.selection.best.penalty * r.density.window}};
    } else {
        throw ConfigError("unknown method '" + a.method + "' (expected wavelet or fourier)");
    }
    Output out(a.out);
    *out << graph_to_json(g).dump(2) << '\n';
    return 0;
}

int run_discover(const EstimateArgs& a) {
    const NamedSeries s = load_series(a.in);
    const ScaleHint hint = ScaleHint::parse(a.scale);
    const auto est = estimate_scale_precisions(s.data, wavelet_settings(a));
    const int j = hint.resolve(static_cast<int>(est.estimates.size()));
    NamedGraph g{s.names, discover_network(est.estimates, hint), {"wavelet_discovery", {j}, lambdas(est.estimates)}};
    Output out(a.out);
    *out << graph_to_json(g).dump(2) << '\n';
    return 0;
}

int run_benchmark_cmd(const std::string& scenario, const std::string& config,
                      const std::map<std::string, CLI::Option*>& flags, const std::map<std::string, std::string>& values,
                      const std::string& out_path) {
    if (scenario.empty() && config.empty()) throw ConfigError("benchmark needs --scenario <id> or --config <file>");
    BenchmarkScenario s = scenario.empty() ? BenchmarkScenario{} : scenario_by_id(scenario);
    if (!config.empty()) s = read_scenario_config(config, s);
    for (const auto& [key, opt] : flags)
        if (opt->count() > 0) apply_setting(s, key, values.at(key));
    const BenchmarkResult res = run_benchmark(s);
    Output out(out_path);
    write_benchmark_csv(*out, res);
    if (res.failures > 0) {
        std::cerr << "wavecig: " << res.failures << " of " << res.rows.size() << " replicates failed";
        for (const auto& row : res.rows)
            if (!row.ok) {
                std::cerr << " (first: replicate " << row.replicate << ": " << row.error << ")";
                break;
            }
        std::cerr << '\n';
    }
    return 0;
}

int run_forecast(const std::string& in, const std::string& graph_path, int horizon, double ridge,
                 const std::string& out_path) {
    const NamedSeries s = load_series(in);
    const NamedGraph g = read_graph_json(graph_path);
    if (g.nodes.size() != s.names.size())
        throw DataError("graph has " + std::to_string(g.nodes.size()) + " nodes but data has " +
                        std::to_string(s.names.size()) + " columns");
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i] != s.names[i])
            throw DataError("graph node '" + g.nodes[i] + "' does not match CSV column '" + s.names[i] + "'");
    const ForecastReport rep = fit_gnar_forecast(s.data, g.graph, horizon, ridge);
    Output out(out_path);
    *out << std::setprecision(10) << "horizon,mspe\n";
    for (std::size_t h = 0; h < rep.mspe.size(); ++h) *out << h + 1 << ',' << rep.mspe[h] << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(args);
    } catch (const Error& e) {
        std::cerr << "wavecig: " << e.what() << '\n';
        return e.exit_code();
    }

    CLI::App app{"Conditional independence graphs of multivariate time series"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate a GNAR, VAR or VARMA process to CSV");
    simulate->add_option("--kind", sim.kind, "gnar, var_ring, var_noise_precision, varma_block or white_noise")
        ->capture_default_str();
    simulate->add_option("--graph", sim.graph, "GNAR network: ring:P, complete:P or er:P:rho[:seed]")->capture_default_str();
    simulate->add_option("--nodes,--P", sim.nodes, "Channel count for non-GNAR kinds")->capture_default_str();
    simulate->add_option("--alpha", sim.alpha, "GNAR autoregressive coefficient")->capture_default_str();
    simulate->add_option("--beta", sim.beta, "GNAR network coefficient")->capture_default_str();
    simulate->add_option("--beta-lo", sim.beta_lo, "Lower end of the ring VAR coefficient interval")->capture_default_str();
    simulate->add_option("--beta-hi", sim.beta_hi, "Upper end of the ring VAR coefficient interval")->capture_default_str();
    simulate->add_option("--T", sim.length, "Series length")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    simulate->add_option("--burn-in", sim.burn_in, "Discarded leading samples")->capture_default_str();
    simulate->add_option("--out", sim.out, "Output CSV (stdout if omitted)");
    simulate->add_option("--truth", sim.truth, "Also write the true CIG as graph JSON");

    EstimateArgs est;
    auto add_wavelet_options = [&est](CLI::App* sub) {
        sub->add_option("--in", est.in, "Input CSV with a header row (stdin if omitted)");
        sub->add_option("--R", est.bootstraps, "Bootstrap replicates")->capture_default_str();
        sub->add_option("--criterion", est.criterion, "aic, bic or ebic")->capture_default_str();
        sub->add_option("--gamma", est.gamma, "eBIC gamma")->capture_default_str();
        sub->add_option("--wavelet", est.wavelet, "haar or db1..db10")->capture_default_str();
        sub->add_option("--seed", est.seed, "Bootstrap seed")->capture_default_str();
        sub->add_option("--out", est.out, "Output graph JSON (stdout if omitted)");
    };
    auto* estimate = app.add_subcommand("estimate", "Estimate the conditional independence graph");
    add_wavelet_options(estimate);
    estimate->add_option("--method", est.method, "wavelet or fourier")->capture_default_str();
    estimate->add_option("--mt", est.half_window, "Fourier half window (0 picks floor(sqrt(T)/2))")->capture_default_str();
    estimate->add_option("--fourier-criterion", est.fourier_criterion, "Fourier criterion")->capture_default_str();
    estimate->add_option("--arity", est.arity, "Scales combined by the similarity rule (2 or 3)")->capture_default_str();

    auto* discover = app.add_subcommand("discover", "Recover the underlying GNAR network");
    add_wavelet_options(discover);
    discover->add_option("--scale", est.scale, "finest, middle or a scale index j")->capture_default_str();

    std::string scenario, bench_config, bench_out;
    std::map<std::string, std::string> bench_values;
    std::map<std::string, CLI::Option*> bench_flags;
    auto* benchmark = app.add_subcommand("benchmark", "Run a simulation scenario and report edge rates");
    benchmark->add_option("--scenario", scenario, "Built-in scenario id");
    benchmark->add_option("--config", bench_config, "key=value scenario file");
    benchmark->add_option("--out", bench_out, "Output CSV (stdout if omitted)");
    for (const char* key : {"K", "R", "T", "seed", "method", "nodes", "rho", "beta", "criterion", "gamma", "wavelet",
                            "scale", "mt"})
        bench_flags[key] = benchmark->add_option(std::string("--") + key, bench_values[key], "Scenario setting " + std::string(key));

    std::string fc_in, fc_graph, fc_out;
    int horizon = 1;
    double ridge = 0.0;
    auto* forecast = app.add_subcommand("forecast", "GNAR(1,[1]) forecasts and MSPE on a held-out tail");
    forecast->add_option("--in", fc_in, "Input CSV (stdin if omitted)");
    forecast->add_option("--graph", fc_graph, "Network graph JSON")->required();
    forecast->add_option("--horizon", horizon, "Forecast horizon H")->capture_default_str();
    forecast->add_option("--ridge", ridge, "Ridge penalty for rank-deficient designs")->capture_default_str();
    forecast->add_option("--out", fc_out, "Output CSV (stdout if omitted)");

    for (auto* sub : {simulate, estimate, discover, forecast})
        sub->add_option("--config", "key=value file; flags override it");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*estimate) return run_estimate(est);
        if (*discover) return run_discover(est);
        if (*benchmark) return run_benchmark_cmd(scenario, bench_config, bench_flags, bench_values, bench_out);
        if (*forecast) return run_forecast(fc_in, fc_graph, horizon, ridge, fc_out);
    } catch (const Error& e) {
        std::cerr << "wavecig: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "wavecig: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
