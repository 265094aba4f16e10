#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qwalk {

struct IntegratorConfig {
    enum class Method { rk4_fixed, adaptive_rk45 };
    Method method = Method::adaptive_rk45;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double max_step = std::numeric_limits<double>::infinity();
    bool renormalize_trace = false;
    // Jump sets without diagonal structure need full operator products; the
    // O(N^3) cost is capped here.
    int max_dense_dim = 64;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
        if (!(max_step > 0.0)) throw std::invalid_argument("IntegratorConfig: max_step must be > 0");
    }
};

struct StepStats {
    long long steps = 0;
    long long rhs_evals = 0;
    long long rejected = 0;
};

namespace ode {

// max_ij |err| / (abs_tol + rel_tol * max(|y0|, |y1|)), elementwise over any
// Eigen matrix/vector type.
template <class State>
double error_ratio(const State& err, const State& y0, const State& y1, double abs_tol, double rel_tol) {
    auto denom = (rel_tol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs())).array() + abs_tol;
    return (err.cwiseAbs().array() / denom).maxCoeff();
}

// Classic RK4 with the segment split into equal steps no longer than
// max_step. Fully deterministic for reproducibility runs.
template <class State, class Rhs, class PostStep>
void rk4_segment(State& y, double t0, double t1, double max_step, Rhs&& rhs, StepStats& stats,
                 PostStep&& post) {
    double span = t1 - t0;
    if (span <= 0.0) return;
    int nsub = std::isfinite(max_step) ? static_cast<int>(std::ceil(span / max_step)) : 1;
    nsub = std::max(nsub, 1);
    double h = span / nsub;
    for (int i = 0; i < nsub; ++i) {
        double t = t0 + i * h;
        State k1 = rhs(t, y);
        State k2 = rhs(t + 0.5 * h, State(y + 0.5 * h * k1));
        State k3 = rhs(t + 0.5 * h, State(y + 0.5 * h * k2));
        State k4 = rhs(t + h, State(y + h * k3));
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        stats.steps += 1;
        stats.rhs_evals += 4;
        post(y);
    }
}

// Embedded Cash-Karp 4(5) pair with PI-free step control. h_next carries the
// step size across consecutive segments of a sampling grid.
template <class State, class Rhs, class PostStep>
void rk45_segment(State& y, double t0, double t1, const IntegratorConfig& cfg, Rhs&& rhs,
                  StepStats& stats, double& h_next, PostStep&& post) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
    static constexpr double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0, a53 = -70.0 / 27.0, a54 = 35.0 / 27.0;
    static constexpr double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0, a63 = 575.0 / 13824.0,
                            a64 = 44275.0 / 110592.0, a65 = 253.0 / 4096.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 3.0 / 5.0, c5 = 1.0, c6 = 7.0 / 8.0;
    static constexpr double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0, b4 = 125.0 / 594.0,
                            b6 = 512.0 / 1771.0;
    static constexpr double d1 = b1 - 2825.0 / 27648.0, d3 = b3 - 18575.0 / 48384.0,
                            d4 = b4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0, d6 = b6 - 0.25;

    double t = t0;
    if (t1 <= t0) return;
    double h = h_next > 0.0 ? h_next : std::min(cfg.max_step, t1 - t0);
    h = std::min(h, cfg.max_step);
    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw std::runtime_error("adaptive step size underflow at t = " + std::to_string(t));
        State k1 = rhs(t, y);
        State k2 = rhs(t + c2 * h, State(y + h * (a21 * k1)));
        State k3 = rhs(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
        State k4 = rhs(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        State k5 = rhs(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        State k6 = rhs(t + c6 * h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        stats.rhs_evals += 6;
        State ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
        State err = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        double ratio = error_ratio(err, y, ynew, cfg.abs_tol, cfg.rel_tol);
        if (ratio <= 1.0) {
            t += h;
            y = std::move(ynew);
            stats.steps += 1;
            post(y);
            double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            h = std::min(cfg.max_step, h * std::clamp(grow, 0.2, 5.0));
        } else {
            stats.rejected += 1;
            h *= std::max(0.2, 0.9 * std::pow(ratio, -0.25));
        }
    }
    h_next = h;
}

}  // namespace ode
}  // namespace qwalk
