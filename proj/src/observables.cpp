#include "qwalk/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qwalk/ode.hpp"

namespace qwalk {

Eigen::VectorXd distribution_at(const Trajectory& traj, double t, bool interpolate) {
    if (traj.times.empty()) throw std::invalid_argument("distribution_at: empty trajectory");
    const auto& ts = traj.times;
    double scale = std::max(1.0, std::abs(ts.back()));
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it != ts.end() && std::abs(*it - t) <= 1e-12 * scale)
        return traj.populations[it - ts.begin()];
    if (it != ts.begin() && std::abs(*(it - 1) - t) <= 1e-12 * scale)
        return traj.populations[it - ts.begin() - 1];
    if (!interpolate)
        throw std::invalid_argument("distribution_at: t not on the sample grid (interpolation off)");
    if (t < ts.front() || t > ts.back())
        throw std::invalid_argument("distribution_at: t outside the sampled range");
    std::size_t hi = it - ts.begin();
    std::size_t lo = hi - 1;
    double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - w) * traj.populations[lo] + w * traj.populations[hi];
}

double mean_square_displacement(const Eigen::VectorXd& dist,
                                std::span<const std::vector<int>> labels) {
    if (static_cast<std::size_t>(dist.size()) != labels.size())
        throw std::invalid_argument("mean_square_displacement: label count mismatch");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
        double r2 = 0.0;
        for (int c : labels[i]) r2 += static_cast<double>(c) * c;
        acc += r2 * dist[i];
    }
    return acc;
}

double mean_square_displacement(const Eigen::VectorXd& dist, const Graph& g) {
    if (g.label_kind != NodeLabelKind::lattice)
        throw std::invalid_argument("mean_square_displacement: graph has no lattice labels");
    return mean_square_displacement(dist, g.lattice_labels);
}

Trajectory classical_ctrw_evolve(const Graph& g, const ClassicalCtrwSpec& spec,
                                 const Eigen::VectorXd& p0, const std::vector<double>& t_grid,
                                 const IntegratorConfig& cfg) {
    if (!(spec.rate > 0.0)) throw std::invalid_argument("classical_ctrw_evolve: rate must be > 0");
    if (p0.size() != g.num_nodes)
        throw std::invalid_argument("classical_ctrw_evolve: initial vector size mismatch");
    if (t_grid.empty()) throw std::invalid_argument("classical_ctrw_evolve: empty time grid");
    cfg.validate();

    // generator rate * (A - deg), assembled sparse
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(g.num_nodes);
    for (const auto& e : g.edges) {
        trip.emplace_back(e.i, e.j, spec.rate);
        trip.emplace_back(e.j, e.i, spec.rate);
        deg[e.i] += spec.rate;
        deg[e.j] += spec.rate;
    }
    for (int i = 0; i < g.num_nodes; ++i) trip.emplace_back(i, i, -deg[i]);
    Eigen::SparseMatrix<double> gen(g.num_nodes, g.num_nodes);
    gen.setFromTriplets(trip.begin(), trip.end());

    auto rhs = [&](double, const Eigen::VectorXd& p) { return Eigen::VectorXd(gen * p); };

    Trajectory traj;
    traj.times = t_grid;
    StepStats stats;
    IntegrationDiagnostics diag;
    Eigen::VectorXd p = p0;
    auto post = [&](Eigen::VectorXd& v) {
        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(v.sum() - 1.0));
    };
    traj.populations.push_back(p);
    double h_next = 0.0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("classical_ctrw_evolve: time grid must be strictly increasing");
        if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
            double h = std::isfinite(cfg.max_step) ? cfg.max_step : (t_grid[i] - t_grid[i - 1]);
            ode::rk4_segment(p, t_grid[i - 1], t_grid[i], h, rhs, stats, post);
        } else {
            ode::rk45_segment(p, t_grid[i - 1], t_grid[i], cfg, rhs, stats, h_next, post);
        }
        traj.populations.push_back(p);
    }
    diag.steps = stats.steps;
    diag.rhs_evals = stats.rhs_evals;
    diag.rejected_steps = stats.rejected;
    traj.diagnostics = diag;
    return traj;
}

ExponentFit exponent_fit(const ObservableSeries& series, double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw std::invalid_argument("exponent_fit: need 0 < t_lo < t_hi");
    std::vector<double> lt, lv;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        double t = series.times[i];
        if (t < t_lo || t > t_hi) continue;
        double v = series.values[i];
        if (!(v > 0.0))
            throw std::invalid_argument("exponent_fit: non-positive value inside the fit window");
        lt.push_back(std::log(t));
        lv.push_back(std::log(v));
    }
    if (lt.size() < 2) throw std::invalid_argument("exponent_fit: fewer than two points in window");
    double n = static_cast<double>(lt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sx += lt[i];
        sy += lv[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * lv[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        double r = lv[i] - (icept + slope * lt[i]);
        ss += r * r;
    }
    return {slope, std::sqrt(ss / n)};
}

ObservableSeries envelope_average(const ObservableSeries& series, double window) {
    if (!(window > 0.0)) throw std::invalid_argument("envelope_average: window must be > 0");
    const auto& ts = series.times;
    const auto& vs = series.values;
    if (ts.size() < 2) throw std::invalid_argument("envelope_average: need at least two samples");
    // cumulative trapezoid integral F with linear interpolation between nodes
    std::vector<double> cum(ts.size(), 0.0);
    for (std::size_t i = 1; i < ts.size(); ++i)
        cum[i] = cum[i - 1] + 0.5 * (vs[i] + vs[i - 1]) * (ts[i] - ts[i - 1]);
    auto integral_to = [&](double t) {
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        std::size_t hi = std::min<std::size_t>(it - ts.begin(), ts.size() - 1);
        if (hi == 0) return cum[0];
        std::size_t lo = hi - 1;
        double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        double v_at = vs[lo] + w * (vs[hi] - vs[lo]);
        return cum[lo] + 0.5 * (vs[lo] + v_at) * (t - ts[lo]);
    };
    ObservableSeries out;
    out.label = series.label + "_envelope";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double lo = ts[i] - 0.5 * window, hi = ts[i] + 0.5 * window;
        if (lo < ts.front() || hi > ts.back()) continue;
        out.times.push_back(ts[i]);
        out.values.push_back((integral_to(hi) - integral_to(lo)) / window);
    }
    return out;
}

ZenoScanResult zeno_scan(const Graph& g, std::span<const double> gammas, double t_probe,
                         const IntegratorConfig& cfg) {
    if (gammas.empty()) throw std::invalid_argument("zeno_scan: empty gamma list");
    if (!(t_probe > 0.0)) throw std::invalid_argument("zeno_scan: t_probe must be > 0");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (gammas[i] < 0.0) throw std::invalid_argument("zeno_scan: gammas must be >= 0");
        if (i > 0 && gammas[i] <= gammas[i - 1])
            throw std::invalid_argument("zeno_scan: gammas must be ascending");
    }
    auto h = hamiltonian_sparse(g);
    int origin = g.origin_index();
    std::vector<double> t_grid = {0.0, t_probe};
    ZenoScanResult out;
    for (double gamma : gammas) {
        double p00;
        if (gamma == 0.0) {
            Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(g.num_nodes);
            psi[origin] = 1.0;
            p00 = schrodinger_evolve(psi, h, t_grid, cfg).populations.back()[origin];
        } else {
            auto jumps = JumpOperatorSet::site_projectors(g.num_nodes, gamma);
            p00 = evolve(node_state(g.num_nodes, origin), h, jumps, t_grid, cfg)
                      .populations.back()[origin];
        }
        out.gammas.push_back(gamma);
        out.p_origin.push_back(p00);
    }
    out.min_index = static_cast<int>(
        std::min_element(out.p_origin.begin(), out.p_origin.end()) - out.p_origin.begin());
    return out;
}

}  // namespace qwalk
