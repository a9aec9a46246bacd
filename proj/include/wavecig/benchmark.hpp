#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cig.hpp"
#include "fourier.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "network.hpp"
#include "parallel.hpp"
#include "simulate.hpp"
#include "surrogate.hpp"

namespace wavecig {

inline constexpr const char* kVersion = "0.1.0";

enum class BenchmarkModel { Gnar, RingVar, NoisePrecisionVar, BlockVarma, WhiteNoise };
enum class BenchmarkMethod { Wavelet, Fourier };

struct BenchmarkScenario {
    std::string id = "custom";
    BenchmarkModel model = BenchmarkModel::Gnar;
    std::string graph = "er";  // er | ring (GNAR only)
    int nodes = 10;
    double rho = 0.1;
    double alpha = 0.0;
    double beta = 0.85;
    double beta_lo = 0.6;
    double beta_hi = 0.7;
    Index length = 1024;
    int replicates = 50;
    BenchmarkMethod method = BenchmarkMethod::Wavelet;
    bool discovery = false;
    std::string scale = "finest";
    int bootstraps = 50;
    Criterion criterion = Criterion::EBIC;
    double gamma = 0.5;
    std::string wavelet = "haar";
    int half_window = 0;
    Criterion fourier_criterion = Criterion::BIC;
    std::uint64_t seed = 1;

    void validate() const {
        if (replicates < 1) throw ConfigError("replicate count K must be >= 1");
        if (bootstraps < 1) throw ConfigError("bootstrap count R must be >= 1");
        if (nodes < 2) throw ConfigError("scenario needs at least 2 nodes");
        if (length < 8) throw ConfigError("series length must be >= 8");
        if (discovery && (model != BenchmarkModel::Gnar || method != BenchmarkMethod::Wavelet))
            throw ConfigError("network discovery scenarios need a GNAR model and the wavelet method");
        if (model == BenchmarkModel::Gnar && graph != "er" && graph != "ring")
            throw ConfigError("GNAR graph must be 'er' or 'ring'");
    }
};

inline BenchmarkModel parse_model(const std::string& s) {
    if (s == "gnar") return BenchmarkModel::Gnar;
    if (s == "var_ring") return BenchmarkModel::RingVar;
    if (s == "var_noise_precision") return BenchmarkModel::NoisePrecisionVar;
    if (s == "varma_block") return BenchmarkModel::BlockVarma;
    if (s == "white_noise") return BenchmarkModel::WhiteNoise;
    throw ConfigError("unknown model '" + s +
                      "' (expected gnar, var_ring, var_noise_precision, varma_block or white_noise)");
}

inline BenchmarkMethod parse_method(const std::string& s) {
    if (s == "wavelet" || s == "wavelet_l1") return BenchmarkMethod::Wavelet;
    if (s == "fourier" || s == "fourier_l1") return BenchmarkMethod::Fourier;
    throw ConfigError("unknown method '" + s + "' (expected wavelet or fourier)");
}

/// Applies one key=value setting. Unknown keys are rejected.
inline void apply_setting(BenchmarkScenario& s, const std::string& key, const std::string& value) {
    try {
        if (key == "id") s.id = value;
        else if (key == "model") s.model = parse_model(value);
        else if (key == "graph") s.graph = value;
        else if (key == "nodes" || key == "P") s.nodes = std::stoi(value);
        else if (key == "rho") s.rho = std::stod(value);
        else if (key == "alpha") s.alpha = std::stod(value);
        else if (key == "beta") s.beta = std::stod(value);
        else if (key == "beta_lo") s.beta_lo = std::stod(value);
        else if (key == "beta_hi") s.beta_hi = std::stod(value);
        else if (key == "T" || key == "length") s.length = std::stol(value);
        else if (key == "K" || key == "replicates") s.replicates = std::stoi(value);
        else if (key == "method") s.method = parse_method(value);
        else if (key == "discovery") s.discovery = value == "1" || value == "true" || value == "yes";
        else if (key == "scale") s.scale = value;
        else if (key == "R" || key == "bootstraps") s.bootstraps = std::stoi(value);
        else if (key == "criterion") s.criterion = parse_criterion(value);
        else if (key == "gamma") s.gamma = std::stod(value);
        else if (key == "wavelet") s.wavelet = value;
        else if (key == "half_window" || key == "mt") s.half_window = std::stoi(value);
        else if (key == "fourier_criterion") s.fourier_criterion = parse_criterion(value);
        else if (key == "seed") s.seed = std::stoull(value);
        else throw ConfigError("unknown scenario key '" + key + "'");
    } catch (const std::logic_error&) {
        throw ConfigError("bad value '" + value + "' for scenario key '" + key + "'");
    }
}

/// Built-in designs, named after the experiments they mirror.
inline const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& scenario_catalog() {
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> catalog = {
        {"t1_er_rho01", {{"graph", "er"}, {"rho", "0.1"}, {"beta", "0.85"}}},
        {"t1_er_rho04", {{"graph", "er"}, {"rho", "0.4"}, {"beta", "0.85"}}},
        {"t1_er_rho01_fourier", {{"graph", "er"}, {"rho", "0.1"}, {"beta", "0.85"}, {"method", "fourier"}}},
        {"t1_er_rho04_fourier", {{"graph", "er"}, {"rho", "0.4"}, {"beta", "0.85"}, {"method", "fourier"}}},
        {"er25_rho005", {{"graph", "er"}, {"nodes", "25"}, {"rho", "0.05"}, {"beta", "0.85"}}},
        {"er25_rho01", {{"graph", "er"}, {"nodes", "25"}, {"rho", "0.1"}, {"beta", "0.85"}}},
        {"ring10_b065", {{"graph", "ring"}, {"beta", "0.65"}}},
        {"ring10_b035", {{"graph", "ring"}, {"beta", "0.35"}}},
        {"ring25_b065", {{"graph", "ring"}, {"nodes", "25"}, {"beta", "0.65"}}},
        {"ring25_b035", {{"graph", "ring"}, {"nodes", "25"}, {"beta", "0.35"}}},
        {"discover_ring10_b065", {{"graph", "ring"}, {"beta", "0.65"}, {"discovery", "1"}}},
        {"discover_ring10_b035", {{"graph", "ring"}, {"beta", "0.35"}, {"discovery", "1"}}},
        {"discover_ring25_b065", {{"graph", "ring"}, {"nodes", "25"}, {"beta", "0.65"}, {"discovery", "1"}}},
        {"discover_ring25_b035", {{"graph", "ring"}, {"nodes", "25"}, {"beta", "0.35"}, {"discovery", "1"}}},
        {"var_ring_i1", {{"model", "var_ring"}, {"beta_lo", "0.6"}, {"beta_hi", "0.7"}}},
        {"var_ring_i2", {{"model", "var_ring"}, {"beta_lo", "0.4"}, {"beta_hi", "0.9"}}},
        {"var_noise_precision", {{"model", "var_noise_precision"}}},
        {"varma_block", {{"model", "varma_block"}, {"nodes", "20"}}},
        {"white_noise10", {{"model", "white_noise"}}},
    };
    return catalog;
}

inline BenchmarkScenario scenario_by_id(const std::string& id) {
    const auto& cat = scenario_catalog();
    const auto it = cat.find(id);
    if (it == cat.end()) {
        std::string known;
        for (const auto& [k, v] : cat) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("unknown scenario '" + id + "'; known: " + known);
    }
    BenchmarkScenario s;
    s.id = id;
    for (const auto& [k, v] : it->second) apply_setting(s, k, v);
    return s;
}

/// Plain-text key=value lines; '#' starts a comment. A `scenario` key loads a
/// catalog entry first, and later lines override it.
inline BenchmarkScenario parse_scenario_config(std::istream& in, BenchmarkScenario base = {}) {
    std::string line;
    int lineno = 0;
    std::vector<std::pair<std::string, std::string>> settings;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        settings.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    for (const auto& [k, v] : settings)
        if (k == "scenario") base = scenario_by_id(v);
    for (const auto& [k, v] : settings)
        if (k != "scenario") apply_setting(base, k, v);
    return base;
}

inline BenchmarkScenario read_scenario_config(const std::string& path, BenchmarkScenario base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_scenario_config(in, std::move(base));
}

/// Fixed parts of a scenario: the generating model and the graph it is scored against.
struct ScenarioDesign {
    VarmaModel model;
    Graph network;  // GNAR network, empty otherwise
    Graph truth;
};

inline ScenarioDesign build_design(const BenchmarkScenario& s) {
    s.validate();
    const RngSeedPlan plan{s.seed};
    ScenarioDesign d;
    switch (s.model) {
        case BenchmarkModel::Gnar: {
            d.network = s.graph == "ring" ? ring_graph(s.nodes) : erdos_renyi(s.nodes, s.rho, plan.seed(0));
            const GnarModel g = gnar_1_1(d.network, s.beta, s.alpha);
            d.model = g.as_var();
            d.truth = s.discovery ? d.network : true_cig_gnar(d.network, g.stages);
            break;
        }
        case BenchmarkModel::RingVar:
            d.model = ring_var_model(s.nodes, s.beta_lo, s.beta_hi, plan.seed(0));
            d.truth = spectral_oracle_var(d.model).graph;
            break;
        case BenchmarkModel::NoisePrecisionVar:
            d.model = noise_precision_var_model(s.nodes, plan.seed(0));
            d.truth = spectral_oracle_var(d.model).graph;
            break;
        case BenchmarkModel::BlockVarma: {
            if (s.nodes % 5 != 0) throw ConfigError("block VARMA needs a node count divisible by 5");
            d.model = block_varma_model(s.nodes / 5, 5);
            d.truth = spectral_oracle_var(d.model).graph;
            break;
        }
        case BenchmarkModel::WhiteNoise:
            d.model = {{}, {}, Matrix::Identity(s.nodes, s.nodes)};
            d.truth = Graph(s.nodes);
            break;
    }
    return d;
}

inline WavTsGlassoConfig wavelet_config(const BenchmarkScenario& s, std::uint64_t seed, unsigned threads) {
    WavTsGlassoConfig c;
    c.wavelet = WaveletSpec::parse(s.wavelet);
    c.bootstraps = s.bootstraps;
    c.criterion = s.criterion;
    c.gamma = s.gamma;
    c.seeds = RngSeedPlan{seed};
    c.threads = threads;
    return c;
}

inline FourierConfig fourier_config(const BenchmarkScenario& s, unsigned threads) {
    FourierConfig c;
    c.half_window = s.half_window;
    c.criterion = s.fourier_criterion;
    c.gamma = s.gamma;
    c.threads = threads;
    return c;
}

struct BenchmarkRow {
    int replicate = 0;
    EdgeRates rates;
    bool ok = true;
    std::string error;
};

struct BenchmarkResult {
    BenchmarkScenario scenario;
    Graph truth;
    std::vector<BenchmarkRow> rows;
    EdgeRates mean;
    int failures = 0;
};

/// Estimated graph for replicate r (0-based) of a scenario.
inline Graph estimate_replicate(const BenchmarkScenario& s, const ScenarioDesign& d, int r, unsigned threads) {
    const RngSeedPlan plan{s.seed};
    const TimeSeries x = simulate_varma(d.model, s.length, plan.child(1).seed(static_cast<std::uint64_t>(r)));
    if (s.method == BenchmarkMethod::Fourier) return fourier_ts_glasso(x, fourier_config(s, threads)).graph;
    const auto cfg = wavelet_config(s, plan.child(2).seed(static_cast<std::uint64_t>(r)), threads);
    if (s.discovery) {
        const ScaleEstimation est = estimate_scale_precisions(x, cfg);
        return discover_network(est.estimates, ScaleHint::parse(s.scale));
    }
    return wav_ts_glasso(x, cfg).graph;
}

/// Replicates run concurrently with per-replicate seeds; results are kept in
/// replicate order and a failed replicate is recorded without stopping the run.
inline BenchmarkResult run_benchmark(const BenchmarkScenario& s, unsigned threads = 0) {
    const ScenarioDesign d = build_design(s);
    BenchmarkResult out;
    out.scenario = s;
    out.truth = d.truth;
    out.rows.resize(static_cast<std::size_t>(s.replicates));
    const unsigned outer = resolve_threads(threads);
    parallel_for(
        out.rows.size(),
        [&](std::size_t r) {
            BenchmarkRow& row = out.rows[r];
            row.replicate = static_cast<int>(r) + 1;
            try {
                row.rates = edge_rates(estimate_replicate(s, d, static_cast<int>(r), 1), d.truth);
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        },
        outer);
    int n = 0;
    for (const auto& row : out.rows) {
        if (!row.ok) {
            ++out.failures;
            continue;
        }
        out.mean.tpr += row.rates.tpr;
        out.mean.fpr += row.rates.fpr;
        out.mean.tdr += row.rates.tdr;
        ++n;
    }
    if (n > 0) {
        out.mean.tpr /= n;
        out.mean.fpr /= n;
        out.mean.tdr /= n;
    } else {
        out.mean.tpr = out.mean.fpr = out.mean.tdr = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

inline void write_benchmark_csv(std::ostream& out, const BenchmarkResult& res) {
    out << "# wavecig " << kVersion << " scenario=" << res.scenario.id << '\n';
    out << "replicate,tpr,fpr,tdr\n";
    out << std::setprecision(10);
    for (const auto& row : res.rows) {
        if (row.ok)
            out << row.replicate << ',' << row.rates.tpr << ',' << row.rates.fpr << ',' << row.rates.tdr << '\n';
        else
            out << row.replicate << ",nan,nan,nan\n";
    }
    out << "mean," << res.mean.tpr << ',' << res.mean.fpr << ',' << res.mean.tdr << '\n';
}

}  // namespace wavecig
