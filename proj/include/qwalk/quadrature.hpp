#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qwalk::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Adaptive Simpson with Richardson correction. rel_tol is applied against a
// running magnitude estimate; abs_tol is the floor.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12, double abs_tol = 1e-300);

// Composite fixed-order Gauss rule over equal panels; meant for smooth
// oscillatory integrands where the panel width resolves one oscillation.
template <class F>
double panel_gauss(F&& f, double a, double b, int panels, const std::vector<double>& nodes,
                   const std::vector<double>& weights) {
    double total = 0.0;
    double w = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        double lo = a + k * w;
        double mid = lo + 0.5 * w;
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + 0.5 * w * nodes[i]);
        total += 0.5 * w * acc;
    }
    return total;
}

// Mean of a periodic function over [0, 2pi), refined by point doubling until
// the change drops below tol (relative to max(1, |value|)). The trapezoid
// rule on a full period converges spectrally for smooth integrands.
template <class F>
double periodic_mean(F&& f, int initial_points, double tol = 1e-8, int max_doublings = 16) {
    const double two_pi = 6.28318530717958647692;
    int n = std::max(initial_points, 64);
    double sum = 0.0;
    double h = two_pi / n;
    for (int i = 0; i < n; ++i) sum += f(i * h);
    double value = sum / n;
    for (int d = 0; d < max_doublings; ++d) {
        // new points are the midpoints of the current grid
        double add = 0.0;
        for (int i = 0; i < n; ++i) add += f((i + 0.5) * h);
        sum += add;
        n *= 2;
        h *= 0.5;
        double next = sum / n;
        double change = std::abs(next - value);
        value = next;
        if (change <= tol * std::max(1.0, std::abs(value))) return value;
    }
    throw std::runtime_error("periodic_mean: quadrature did not converge after point-doubling cap");
}

}  // namespace qwalk::quad
