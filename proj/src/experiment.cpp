#include "qwalk/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "qwalk/closed_form.hpp"
#include "qwalk/csv.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/lindblad.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/spin_bath.hpp"
#include "qwalk/version.hpp"

namespace qwalk::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::set<std::string> kTimeSeriesObservables = {"p_origin", "p_far", "msd"};
const std::set<std::string> kAllObservables = {"p_origin", "p_far", "msd", "distribution",
                                               "offdiag_rates"};

std::string iso_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double require_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "must be a number");
    return j.get<double>();
}

int require_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "must be an integer");
    return j.get<int>();
}

}  // namespace

int node_budget() {
    if (const char* env = std::getenv("QWALK_NODE_BUDGET")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return kDefaultNodeBudget;
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("(root)", "config must be a JSON object");
    ExperimentConfig cfg;

    if (!j.contains("model")) throw ConfigError("model", "missing");
    const auto& model = j.at("model");
    std::string mtype = model.value("type", "");
    if (mtype == "hypercube") {
        cfg.model.type = ModelConfig::Type::hypercube;
        if (!model.contains("D")) throw ConfigError("model.D", "missing");
        cfg.model.dim = require_int(model.at("D"), "model.D");
        if (cfg.model.dim < 1) throw ConfigError("model.D", "must be >= 1");
    } else if (mtype == "hyperlattice") {
        cfg.model.type = ModelConfig::Type::hyperlattice;
        if (!model.contains("d")) throw ConfigError("model.d", "missing");
        cfg.model.dim = require_int(model.at("d"), "model.d");
        if (cfg.model.dim < 1) throw ConfigError("model.d", "must be >= 1");
        if (!model.contains("L")) throw ConfigError("model.L", "missing");
        cfg.model.halfwidth = require_int(model.at("L"), "model.L");
        if (cfg.model.halfwidth < 1) throw ConfigError("model.L", "must be >= 1");
    } else {
        throw ConfigError("model.type", "must be 'hypercube' or 'hyperlattice'");
    }
    if (!model.contains("delta0")) throw ConfigError("model.delta0", "missing");
    cfg.model.hop = require_number(model.at("delta0"), "model.delta0");

    if (!j.contains("decoherence")) throw ConfigError("decoherence", "missing");
    const auto& dec = j.at("decoherence");
    std::string dtype = dec.value("type", "");
    if (dtype == "none") {
        cfg.decoherence.type = DecoherenceConfig::Type::none;
    } else if (dtype == "site" || dtype == "qubit") {
        cfg.decoherence.type =
            dtype == "site" ? DecoherenceConfig::Type::site : DecoherenceConfig::Type::qubit;
        if (!dec.contains("gamma")) throw ConfigError("decoherence.gamma", "missing");
        cfg.decoherence.gamma = require_number(dec.at("gamma"), "decoherence.gamma");
        if (cfg.decoherence.gamma < 0.0) throw ConfigError("decoherence.gamma", "must be >= 0");
    } else if (dtype == "spinbath") {
        cfg.decoherence.type = DecoherenceConfig::Type::spinbath;
        if (!dec.contains("lambda")) throw ConfigError("decoherence.lambda", "missing");
        cfg.decoherence.lambda = require_number(dec.at("lambda"), "decoherence.lambda");
        if (cfg.decoherence.lambda < 10.0)
            throw ConfigError("decoherence.lambda",
                              "must be >= 10 (only the strong-decoherence limit is modelled)");
    } else if (dtype == "classical") {
        cfg.decoherence.type = DecoherenceConfig::Type::classical;
        if (!dec.contains("rate")) throw ConfigError("decoherence.rate", "missing");
        cfg.decoherence.rate = require_number(dec.at("rate"), "decoherence.rate");
        if (!(cfg.decoherence.rate > 0.0)) throw ConfigError("decoherence.rate", "must be > 0");
    } else {
        throw ConfigError("decoherence.type",
                          "must be one of none/site/qubit/spinbath/classical");
    }
    if (cfg.decoherence.type == DecoherenceConfig::Type::spinbath &&
        cfg.model.type != ModelConfig::Type::hyperlattice)
        throw ConfigError("decoherence.type", "spinbath requires the hyperlattice model");
    if (cfg.decoherence.type == DecoherenceConfig::Type::qubit &&
        cfg.model.type != ModelConfig::Type::hypercube)
        throw ConfigError("decoherence.type", "qubit dephasing requires the hypercube model");

    if (!j.contains("time")) throw ConfigError("time", "missing");
    const auto& time = j.at("time");
    if (!time.contains("t_max")) throw ConfigError("time.t_max", "missing");
    cfg.time.t_max = require_number(time.at("t_max"), "time.t_max");
    if (!(cfg.time.t_max > 0.0)) throw ConfigError("time.t_max", "must be > 0");
    if (!time.contains("num_points")) throw ConfigError("time.num_points", "missing");
    cfg.time.num_points = require_int(time.at("num_points"), "time.num_points");
    if (cfg.time.num_points < 2) throw ConfigError("time.num_points", "must be >= 2");
    std::string grid = time.value("grid", "linear");
    if (grid == "linear") {
        cfg.time.grid = TimeGridConfig::Grid::linear;
    } else if (grid == "log") {
        cfg.time.grid = TimeGridConfig::Grid::log;
        cfg.time.t_min = time.contains("t_min")
                             ? require_number(time.at("t_min"), "time.t_min")
                             : cfg.time.t_max / 100.0;
        if (!(cfg.time.t_min > 0.0) || cfg.time.t_min >= cfg.time.t_max)
            throw ConfigError("time.t_min", "must satisfy 0 < t_min < t_max");
    } else {
        throw ConfigError("time.grid", "must be 'linear' or 'log'");
    }

    if (!j.contains("observables") || !j.at("observables").is_array() || j.at("observables").empty())
        throw ConfigError("observables", "must be a non-empty array");
    for (const auto& o : j.at("observables")) {
        std::string name = o.get<std::string>();
        if (!kAllObservables.count(name)) throw ConfigError("observables", "unknown observable '" + name + "'");
        cfg.observables.push_back(name);
    }
    auto has_obs = [&](const std::string& n) {
        return std::find(cfg.observables.begin(), cfg.observables.end(), n) != cfg.observables.end();
    };
    if (has_obs("p_far") && cfg.model.type != ModelConfig::Type::hypercube)
        throw ConfigError("observables", "p_far requires the hypercube model");
    if (has_obs("msd") && cfg.model.type != ModelConfig::Type::hyperlattice)
        throw ConfigError("observables", "msd requires the hyperlattice model");
    if (has_obs("offdiag_rates")) {
        if (cfg.decoherence.type != DecoherenceConfig::Type::site &&
            cfg.decoherence.type != DecoherenceConfig::Type::qubit)
            throw ConfigError("observables", "offdiag_rates requires site or qubit decoherence");
        if (cfg.model.hop != 0.0)
            throw ConfigError("observables",
                              "offdiag_rates requires model.delta0 = 0 (pure-exponential decay)");
        if (cfg.model.type != ModelConfig::Type::hypercube)
            throw ConfigError("observables", "offdiag_rates requires the hypercube model");
    }

    if (j.contains("integrator")) {
        const auto& integ = j.at("integrator");
        std::string method = integ.value("method", "adaptive");
        if (method == "adaptive")
            cfg.integrator.method = IntegratorConfig::Method::adaptive_rk45;
        else if (method == "rk4")
            cfg.integrator.method = IntegratorConfig::Method::rk4_fixed;
        else
            throw ConfigError("integrator.method", "must be 'adaptive' or 'rk4'");
        if (integ.contains("abs_tol"))
            cfg.integrator.abs_tol = require_number(integ.at("abs_tol"), "integrator.abs_tol");
        if (integ.contains("rel_tol"))
            cfg.integrator.rel_tol = require_number(integ.at("rel_tol"), "integrator.rel_tol");
        if (!(cfg.integrator.abs_tol > 0.0)) throw ConfigError("integrator.abs_tol", "must be > 0");
        if (!(cfg.integrator.rel_tol > 0.0)) throw ConfigError("integrator.rel_tol", "must be > 0");
        if (integ.contains("max_step")) {
            cfg.integrator.max_step = require_number(integ.at("max_step"), "integrator.max_step");
            if (!(cfg.integrator.max_step > 0.0)) throw ConfigError("integrator.max_step", "must be > 0");
        }
        if (integ.contains("renormalize_trace")) {
            if (!integ.at("renormalize_trace").is_boolean())
                throw ConfigError("integrator.renormalize_trace", "must be a boolean");
            cfg.integrator.renormalize_trace = integ.at("renormalize_trace").get<bool>();
        }
    }
    // fixed-step runs need a concrete step
    if (cfg.integrator.method == IntegratorConfig::Method::rk4_fixed &&
        !std::isfinite(cfg.integrator.max_step))
        cfg.integrator.max_step = cfg.time.t_max / (16.0 * cfg.time.num_points);

    cfg.output_dir = j.value("output_dir", "");
    return cfg;
}

std::vector<double> make_time_grid(const TimeGridConfig& t) {
    std::vector<double> grid(t.num_points);
    if (t.grid == TimeGridConfig::Grid::linear) {
        for (int i = 0; i < t.num_points; ++i)
            grid[i] = t.t_max * static_cast<double>(i) / (t.num_points - 1);
    } else {
        double ratio = t.t_max / t.t_min;
        for (int i = 0; i < t.num_points; ++i)
            grid[i] = t.t_min * std::pow(ratio, static_cast<double>(i) / (t.num_points - 1));
        grid.back() = t.t_max;
    }
    return grid;
}

json ExperimentConfig::echo() const {
    json m;
    if (model.type == ModelConfig::Type::hypercube) {
        m = {{"type", "hypercube"}, {"D", model.dim}, {"delta0", model.hop}};
    } else {
        m = {{"type", "hyperlattice"}, {"d", model.dim}, {"L", model.halfwidth}, {"delta0", model.hop}};
    }
    json d;
    switch (decoherence.type) {
        case DecoherenceConfig::Type::none: d = {{"type", "none"}}; break;
        case DecoherenceConfig::Type::site: d = {{"type", "site"}, {"gamma", decoherence.gamma}}; break;
        case DecoherenceConfig::Type::qubit: d = {{"type", "qubit"}, {"gamma", decoherence.gamma}}; break;
        case DecoherenceConfig::Type::spinbath:
            d = {{"type", "spinbath"}, {"lambda", decoherence.lambda}};
            break;
        case DecoherenceConfig::Type::classical:
            d = {{"type", "classical"}, {"rate", decoherence.rate}};
            break;
    }
    json t = {{"t_max", time.t_max},
              {"num_points", time.num_points},
              {"grid", time.grid == TimeGridConfig::Grid::linear ? "linear" : "log"}};
    if (time.grid == TimeGridConfig::Grid::log) t["t_min"] = time.t_min;
    json integ = {{"method", integrator.method == IntegratorConfig::Method::adaptive_rk45 ? "adaptive"
                                                                                          : "rk4"},
                  {"abs_tol", integrator.abs_tol},
                  {"rel_tol", integrator.rel_tol},
                  {"renormalize_trace", integrator.renormalize_trace}};
    if (std::isfinite(integrator.max_step)) integ["max_step"] = integrator.max_step;
    json out = {{"model", m}, {"decoherence", d}, {"time", t},
                {"observables", observables}, {"integrator", integ}};
    if (!output_dir.empty()) out["output_dir"] = output_dir;
    return out;
}

namespace {

struct ComputedRun {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> series;          // p_origin, p_far, msd
    std::vector<Eigen::VectorXd> distributions;                 // when requested
    std::map<std::pair<int, int>, FittedRate> offdiag;          // when requested
    IntegrationDiagnostics diagnostics;
    bool engine_backed = false;
};

ComputedRun compute(const ExperimentConfig& cfg, const Graph& g) {
    ComputedRun out;
    out.times = make_time_grid(cfg.time);
    auto wants = [&](const std::string& n) {
        return std::find(cfg.observables.begin(), cfg.observables.end(), n) != cfg.observables.end();
    };
    bool want_dist = wants("distribution");
    int origin = g.origin_index();

    auto record_distribution_series = [&](const Trajectory& traj, std::size_t drop_first) {
        for (std::size_t i = drop_first; i < traj.times.size(); ++i) {
            const auto& p = traj.populations[i];
            if (wants("p_origin")) out.series["p_origin"].push_back(p[origin]);
            if (wants("p_far")) out.series["p_far"].push_back(p[g.far_corner_index()]);
            if (wants("msd")) out.series["msd"].push_back(mean_square_displacement(p, g));
            if (want_dist) out.distributions.push_back(p);
        }
    };

    switch (cfg.decoherence.type) {
        case DecoherenceConfig::Type::none: {
            if (cfg.model.type == ModelConfig::Type::hypercube) {
                for (double t : out.times) {
                    Eigen::VectorXd p = free_hypercube_distribution(cfg.model.dim, cfg.model.hop, t);
                    if (wants("p_origin")) out.series["p_origin"].push_back(p[origin]);
                    if (wants("p_far")) out.series["p_far"].push_back(p[g.far_corner_index()]);
                    if (want_dist) out.distributions.push_back(p);
                }
            } else {
                for (double t : out.times) {
                    double z = 2.0 * std::abs(cfg.model.hop) * t;
                    if (wants("p_origin")) {
                        double j00 = free_hyperlattice_prob(std::vector<int>(cfg.model.dim, 0), z);
                        out.series["p_origin"].push_back(j00);
                    }
                    if (wants("msd"))
                        out.series["msd"].push_back(free_msd(cfg.model.dim, cfg.model.hop, t));
                    if (want_dist) {
                        Eigen::VectorXd p(g.num_nodes);
                        for (int idx = 0; idx < g.num_nodes; ++idx)
                            p[idx] = free_hyperlattice_prob(g.lattice_labels[idx], z);
                        out.distributions.push_back(p);
                    }
                }
            }
            break;
        }
        case DecoherenceConfig::Type::spinbath: {
            SpinBathSpec spec;
            spec.dim = cfg.model.dim;
            spec.hop = cfg.model.hop;
            spec.lambda = cfg.decoherence.lambda;
            std::vector<int> zero(cfg.model.dim, 0);
            for (double t : out.times) {
                double z = 2.0 * std::abs(cfg.model.hop) * t;
                if (wants("p_origin")) out.series["p_origin"].push_back(spinbath_prob(zero, z, spec));
                if (wants("msd"))
                    out.series["msd"].push_back(spinbath_msd(cfg.model.dim, cfg.model.hop, t));
                if (want_dist)
                    out.distributions.push_back(
                        spinbath_distribution_box(cfg.model.halfwidth, z, spec));
            }
            break;
        }
        case DecoherenceConfig::Type::classical: {
            std::vector<double> grid = out.times;
            std::size_t drop = 0;
            if (grid.front() > 0.0) {
                grid.insert(grid.begin(), 0.0);
                drop = 1;
            }
            Eigen::VectorXd p0 = Eigen::VectorXd::Zero(g.num_nodes);
            p0[origin] = 1.0;
            Trajectory traj =
                classical_ctrw_evolve(g, {cfg.decoherence.rate}, p0, grid, cfg.integrator);
            out.diagnostics = traj.diagnostics;
            out.engine_backed = true;
            record_distribution_series(traj, drop);
            break;
        }
        case DecoherenceConfig::Type::site:
        case DecoherenceConfig::Type::qubit: {
            if (g.num_nodes > 2048)
                throw ConfigError("model", "density-matrix run too large (more than 2048 nodes)");
            std::vector<double> grid = out.times;
            std::size_t drop = 0;
            if (grid.front() > 0.0) {
                grid.insert(grid.begin(), 0.0);
                drop = 1;
            }
            JumpOperatorSet jumps =
                cfg.decoherence.type == DecoherenceConfig::Type::site
                    ? build_site_projectors(g, cfg.decoherence.gamma)
                    : build_qubit_dephasing(cfg.model.dim, cfg.decoherence.gamma);
            bool want_rates = wants("offdiag_rates");
            // rate extraction needs initial coherences; walks start localized
            DensityMatrix rho0 = want_rates ? uniform_superposition_state(g.num_nodes)
                                            : node_state(g.num_nodes, origin);
            Trajectory traj = evolve(rho0, g, jumps, grid, cfg.integrator, want_rates);
            out.diagnostics = traj.diagnostics;
            out.engine_backed = true;
            record_distribution_series(traj, drop);
            if (want_rates) out.offdiag = offdiag_decay_rates(traj);
            break;
        }
    }
    return out;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::string started = iso_utc_now();
    fs::create_directories(out_dir);

    Graph g = cfg.model.type == ModelConfig::Type::hypercube
                  ? build_hypercube({cfg.model.dim, cfg.model.hop}, node_budget())
                  : build_hyperlattice({cfg.model.dim, cfg.model.hop, cfg.model.halfwidth},
                                       node_budget());
    ComputedRun data = compute(cfg, g);

    RunResult res;
    res.dir = out_dir;
    auto wants = [&](const std::string& n) {
        return std::find(cfg.observables.begin(), cfg.observables.end(), n) != cfg.observables.end();
    };

    for (const std::string name : {"p_origin", "p_far", "msd"}) {
        if (!wants(name)) continue;
        io::Table t;
        t.headers = {"t", "value"};
        t.columns = {data.times, data.series.at(name)};
        io::write_csv(out_dir / (name + std::string(".csv")), t);
        res.outputs.push_back(name + std::string(".csv"));
    }
    if (wants("distribution")) {
        io::Table t;
        t.headers.push_back("t");
        t.columns.push_back(data.times);
        for (int nidx = 0; nidx < g.num_nodes; ++nidx) {
            t.headers.push_back("p" + std::to_string(nidx));
            std::vector<double> col(data.times.size());
            for (std::size_t i = 0; i < data.times.size(); ++i) col[i] = data.distributions[i][nidx];
            t.columns.push_back(std::move(col));
        }
        io::write_csv(out_dir / "distribution.csv", t);
        res.outputs.push_back("distribution.csv");
    }
    if (wants("offdiag_rates")) {
        io::Table t;
        t.headers = {"i", "j", "hamming", "rate", "residual"};
        t.columns.resize(5);
        for (const auto& [pair, fit] : data.offdiag) {
            t.columns[0].push_back(pair.first);
            t.columns[1].push_back(pair.second);
            t.columns[2].push_back(hamming_distance(static_cast<unsigned>(pair.first),
                                                    static_cast<unsigned>(pair.second)));
            t.columns[3].push_back(fit.rate);
            t.columns[4].push_back(fit.residual);
        }
        io::write_csv(out_dir / "offdiag_rates.csv", t);
        res.outputs.push_back("offdiag_rates.csv");
    }
    io::write_json_atomic(out_dir / "graph.json", g.to_json());
    res.outputs.push_back("graph.json");

    json manifest = {{"tool", "qwalk"},
                     {"version", kVersion},
                     {"created_utc", started},
                     {"completed_utc", iso_utc_now()},
                     {"config", cfg.echo()},
                     {"outputs", res.outputs}};
    if (data.engine_backed) {
        manifest["diagnostics"] = {{"max_trace_drift", data.diagnostics.max_trace_drift},
                                   {"max_hermiticity_residual", data.diagnostics.max_hermiticity_residual},
                                   {"steps", data.diagnostics.steps},
                                   {"rhs_evals", data.diagnostics.rhs_evals},
                                   {"rejected_steps", data.diagnostics.rejected_steps}};
    }
    io::write_json_atomic(out_dir / "manifest.json", manifest);
    res.outputs.push_back("manifest.json");
    res.manifest = std::move(manifest);
    return res;
}

RunResult run_file(const fs::path& config_path, const std::optional<fs::path>& out_override) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse failure: " + std::string(e.what()));
    }
    ExperimentConfig cfg = parse_config(j);
    fs::path out = out_override ? *out_override
                                : (!cfg.output_dir.empty() ? fs::path(cfg.output_dir)
                                                           : fs::path("qwalk_out"));
    return run(cfg, out);
}

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

SweepResult sweep(const json& base_config, const std::string& param_path,
                  std::span<const double> values, const fs::path& out_dir) {
    if (values.empty()) throw ConfigError("sweep.values", "empty value list");
    std::vector<std::string> parts;
    {
        std::stringstream ss(param_path);
        std::string p;
        while (std::getline(ss, p, '.'))
            if (!p.empty()) parts.push_back(p);
    }
    if (parts.empty()) throw ConfigError("sweep.param", "empty parameter path");

    // locate the existing numeric leaf to learn its type
    const json* cur = &base_config;
    for (const auto& p : parts) {
        if (!cur->is_object() || !cur->contains(p))
            throw ConfigError("sweep.param", "'" + param_path + "' is not a config path");
        cur = &cur->at(p);
    }
    if (!cur->is_number()) throw ConfigError("sweep.param", "'" + param_path + "' is not numeric");
    bool integral = cur->is_number_integer();

    parse_config(base_config);  // fail fast on an invalid base

    fs::create_directories(out_dir);
    SweepResult result;
    result.dir = out_dir;

    struct Launched {
        SweepOutcome outcome;
        std::future<RunResult> fut;
    };
    std::vector<Launched> launched;
    for (double v : values) {
        Launched l;
        l.outcome.value = v;
        l.outcome.dir_name = parts.back() + "=" + format_value(v);
        json modified = base_config;
        json* node = &modified;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
        if (integral) {
            if (v != std::floor(v))
                throw ConfigError("sweep.values", "'" + param_path + "' requires integer values");
            (*node)[parts.back()] = static_cast<long long>(v);
        } else {
            (*node)[parts.back()] = v;
        }
        fs::path sub = out_dir / l.outcome.dir_name;
        l.fut = std::async(std::launch::async, [modified, sub]() {
            return run(parse_config(modified), sub);
        });
        launched.push_back(std::move(l));
    }
    for (auto& l : launched) {
        try {
            l.fut.get();
            l.outcome.ok = true;
        } catch (const std::exception& e) {
            l.outcome.ok = false;
            l.outcome.error = e.what();
        }
        result.runs.push_back(l.outcome);
    }

    // combined long-format CSV per time-series observable
    ExperimentConfig base_cfg = parse_config(base_config);
    for (const std::string& obs : base_cfg.observables) {
        if (!kTimeSeriesObservables.count(obs)) continue;
        io::Table combined;
        combined.headers = {parts.back(), "t", "value"};
        combined.columns.resize(3);
        bool any = false;
        for (const auto& r : result.runs) {
            if (!r.ok) continue;
            io::Table t = io::read_csv(out_dir / r.dir_name / (obs + ".csv"));
            const auto& ts = t.column("t");
            const auto& vs = t.column("value");
            for (std::size_t i = 0; i < ts.size(); ++i) {
                combined.columns[0].push_back(r.value);
                combined.columns[1].push_back(ts[i]);
                combined.columns[2].push_back(vs[i]);
            }
            any = true;
        }
        if (any) {
            std::string name = "combined_" + obs + ".csv";
            io::write_csv(out_dir / name, combined);
            result.combined_files.push_back(name);
        }
    }
    return result;
}

CompareReport compare(const fs::path& dir_a, const fs::path& dir_b) {
    auto load_manifest = [](const fs::path& dir) {
        std::ifstream in(dir / "manifest.json");
        if (!in) throw std::runtime_error("missing manifest.json in " + dir.string());
        json j;
        in >> j;
        return j;
    };
    json ma = load_manifest(dir_a);
    json mb = load_manifest(dir_b);

    auto series_in = [](const json& m) {
        std::set<std::string> s;
        for (const auto& f : m.at("outputs")) {
            std::string name = f.get<std::string>();
            if (name.size() > 4 && name.ends_with(".csv")) {
                std::string stem = name.substr(0, name.size() - 4);
                if (kTimeSeriesObservables.count(stem)) s.insert(stem);
            }
        }
        return s;
    };
    std::set<std::string> sa = series_in(ma), shared;
    for (const auto& name : series_in(mb))
        if (sa.count(name)) shared.insert(name);
    if (shared.empty()) throw std::runtime_error("compare: no overlapping observables");

    double hop_a = ma.at("config").at("model").at("delta0").get<double>();

    CompareReport rep;
    for (const auto& obs : shared) {
        io::Table ta = io::read_csv(dir_a / (obs + ".csv"));
        io::Table tb = io::read_csv(dir_b / (obs + ".csv"));
        const auto& t1 = ta.column("t");
        const auto& t2 = tb.column("t");
        if (t1 != t2) throw std::runtime_error("compare: time grids differ for " + obs);
        const auto& va = ta.column("value");
        const auto& vb = tb.column("value");

        CompareRow row;
        row.observable = obs;
        double acc = 0.0;
        bool have_ratio = false;
        for (std::size_t i = 0; i < va.size(); ++i) {
            double dev = std::abs(va[i] - vb[i]);
            row.max_abs_dev = std::max(row.max_abs_dev, dev);
            acc += dev;
            if (std::abs(va[i]) > 1e-300) {
                double r = vb[i] / va[i];
                if (!have_ratio) {
                    row.ratio_min = row.ratio_max = r;
                    have_ratio = true;
                } else {
                    row.ratio_min = std::min(row.ratio_min, r);
                    row.ratio_max = std::max(row.ratio_max, r);
                }
                row.ratio_mean += r;
            }
        }
        row.mean_abs_dev = acc / va.size();
        long n_ratio = std::count_if(va.begin(), va.end(),
                                     [](double v) { return std::abs(v) > 1e-300; });
        if (n_ratio > 0) row.ratio_mean /= n_ratio;

        // informational power-law fit over the late window
        try {
            double t_hi = t1.back();
            double t_lo = std::max(t_hi / 4.0, t1.front());
            auto fit_one = [&](const std::vector<double>& vals) {
                ObservableSeries s{obs, t1, vals};
                if (obs != "msd" && hop_a != 0.0) {
                    s = envelope_average(s, kPi / (2.0 * std::abs(hop_a)));
                }
                return exponent_fit(s, t_lo, t_hi).exponent;
            };
            row.exponent_a = fit_one(va);
            row.exponent_b = fit_one(vb);
            row.exponents_valid = true;
        } catch (const std::exception&) {
            row.exponents_valid = false;
        }
        rep.max_abs_dev = std::max(rep.max_abs_dev, row.max_abs_dev);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::string format_report(const CompareReport& rep) {
    std::ostringstream os;
    os << "observable      max_dev      mean_dev     ratio(b/a) min/mean/max      exponents a|b\n";
    char line[256];
    for (const auto& r : rep.rows) {
        std::snprintf(line, sizeof line, "%-12s %12.5g %12.5g   %8.5g/%8.5g/%8.5g", r.observable.c_str(),
                      r.max_abs_dev, r.mean_abs_dev, r.ratio_min, r.ratio_mean, r.ratio_max);
        os << line;
        if (r.exponents_valid) {
            std::snprintf(line, sizeof line, "   %7.3f|%7.3f", r.exponent_a, r.exponent_b);
            os << line;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace qwalk::experiment
