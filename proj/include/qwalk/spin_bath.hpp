#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace qwalk {

struct QuadratureSpec {
    enum class Rule { trapezoid, gauss_legendre };
    Rule rule = Rule::trapezoid;
    int num_points = 256;  // starting resolution, doubled until converged
};

// Strong-decoherence spin-bath model: the environment records inter-node
// transitions, and the reduced walker dynamics is a phase average of the
// free propagator. Only the strong-coupling limit is implemented; the
// lambda field is a guard, not an interpolation parameter.
struct SpinBathSpec {
    int dim = 1;            // lattice dimension d
    double hop = 1.0;       // hop amplitude
    double lambda = 100.0;  // aggregate coupling strength, must be >= 10
    QuadratureSpec quadrature;

    void validate() const;
};

// P_n(z) = (1/2pi) int_0^{2pi} dphi prod_mu J_{n_mu}^2(z cos phi),
// z = 2 hop t. Quadrature points are doubled until the value settles to
// 1e-8; non-convergence throws.
double spinbath_prob(std::span<const int> n, double z, const SpinBathSpec& spec);

// Distribution over n in [-nmax, nmax] (d = 1) computed on one shared phase
// grid, so the quadrature error cancels in the normalization sum.
Eigen::VectorXd spinbath_distribution_1d(int nmax, double z, const SpinBathSpec& spec);

// Same for a d-dimensional box, row-major over (n_1 + nmax) + side*(n_2 +
// nmax) + ... with side = 2 nmax + 1. Intended for small boxes.
Eigen::VectorXd spinbath_distribution_box(int nmax, double z, const SpinBathSpec& spec);

struct ReturnAsymptote {
    bool log_divergent = false;  // d = 1: integral grows like log(z)
    double value = 0.0;          // A_d for d >= 2
};

// A_d = (1/pi) int_0^inf J_0^{2d}(x) dx, the long-time return-probability
// constant z * P_00 -> 2 A_d. Computed over panels with the oscillation-mean
// tail added analytically; the range is doubled until the value settles.
ReturnAsymptote spinbath_return_asymptote(int dim);

// Exactly half the free-walk value: d (hop t)^2.
double spinbath_msd(int dim, double hop, double t);

struct ReturnCurve {
    std::vector<double> z;
    std::vector<double> p00;
};

ReturnCurve spinbath_return_curve(int dim, std::span<const double> z_grid, const SpinBathSpec& spec);

}  // namespace qwalk
