#include "qwalk/closed_form.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qwalk/bessel.hpp"

namespace qwalk {

DephasingParams::DephasingParams(double hop, double gamma) : hop_(hop), gamma_(gamma) {
    if (hop == 0.0) throw std::invalid_argument("DephasingParams: hop must be nonzero");
    if (gamma < 0.0) throw std::invalid_argument("DephasingParams: gamma must be >= 0");
}

DampingRegime DephasingParams::regime() const {
    double crit = 4.0 * std::abs(hop_);
    if (gamma_ < crit) return DampingRegime::underdamped;
    if (gamma_ > crit) return DampingRegime::overdamped;
    return DampingRegime::critical;
}

double DephasingParams::omega() const {
    double r2 = r() * r();
    if (r2 >= 1.0) throw std::domain_error("DephasingParams::omega: not underdamped");
    return 2.0 * std::abs(hop_) * std::sqrt(1.0 - r2);
}

std::pair<double, double> DephasingParams::lambda_pm() const {
    double disc = gamma_ * gamma_ - 16.0 * hop_ * hop_;
    if (disc < 0.0) throw std::domain_error("DephasingParams::lambda_pm: not overdamped");
    double root = std::sqrt(disc);
    return {0.5 * (gamma_ + root), 0.5 * (gamma_ - root)};
}

BlochVector bloch_dephasing(const BlochVector& v0, const DephasingParams& p, double t) {
    if (t < 0.0) throw std::invalid_argument("bloch_dephasing: t must be >= 0");
    double g = p.gamma();
    double d = p.hop();
    // (y,z)' = M (y,z) with M = [[-g, 2d], [-2d, 0]]; writing the solution as
    // e^{-g t/2} [C + S (M + g/2)] keeps one expression valid in all regimes:
    //   nu^2 > 0:  C = cosh(nu t),  S = sinh(nu t)/nu
    //   nu^2 < 0:  C = cos(w t),    S = sin(w t)/w       (w = |nu|)
    //   nu   = 0:  C = 1,           S = t
    double nu2 = 0.25 * g * g - 4.0 * d * d;
    double c, s;
    if (nu2 > 0.0) {
        double nu = std::sqrt(nu2);
        c = std::cosh(nu * t);
        s = std::sinh(nu * t) / nu;
    } else if (nu2 < 0.0) {
        double w = std::sqrt(-nu2);
        c = std::cos(w * t);
        s = (w * t == 0.0) ? t : std::sin(w * t) / w;
    } else {
        c = 1.0;
        s = t;
    }
    double pre = std::exp(-0.5 * g * t);
    BlochVector out;
    out.x = v0.x * std::exp(-g * t);
    out.y = pre * (c * v0.y + s * (2.0 * d * v0.z - 0.5 * g * v0.y));
    out.z = pre * (c * v0.z + s * (0.5 * g * v0.z - 2.0 * d * v0.y));
    return out;
}

double free_hypercube_prob(int dim, double hop, double t, const BitString& target) {
    if (dim < 1) throw std::invalid_argument("free_hypercube_prob: D must be >= 1");
    if (target.length() != dim)
        throw std::invalid_argument("free_hypercube_prob: target length mismatch");
    if (t < 0.0) throw std::invalid_argument("free_hypercube_prob: t must be >= 0");
    double theta = hop * t;
    double c2 = std::cos(theta) * std::cos(theta);
    double s2 = std::sin(theta) * std::sin(theta);
    return std::pow(c2, target.n_down()) * std::pow(s2, target.n_up());
}

Eigen::VectorXd free_hypercube_distribution(int dim, double hop, double t) {
    int n = 1 << dim;
    Eigen::VectorXd out(n);
    double theta = hop * t;
    double c2 = std::cos(theta) * std::cos(theta);
    double s2 = std::sin(theta) * std::sin(theta);
    for (int m = 0; m < n; ++m) {
        int ups = std::popcount(static_cast<unsigned>(m));
        out[m] = std::pow(c2, dim - ups) * std::pow(s2, ups);
    }
    return out;
}

std::pair<double, double> hypercube_probs_from_bloch(double z, int dim) {
    if (std::abs(z) > 1.0 + 1e-9)
        throw std::invalid_argument("hypercube_probs_from_bloch: |z| must be <= 1");
    z = std::clamp(z, -1.0, 1.0);
    return {std::pow(0.5 * (1.0 + z), dim), std::pow(0.5 * (1.0 - z), dim)};
}

double free_hyperlattice_prob(std::span<const int> n, double z) {
    if (z < 0.0) throw std::invalid_argument("free_hyperlattice_prob: z must be >= 0");
    double p = 1.0;
    for (int nm : n) {
        double j = bessel::jn(nm, z);
        p *= j * j;
    }
    return p;
}

double free_msd(int dim, double hop, double t) {
    if (t < 0.0) throw std::invalid_argument("free_msd: t must be >= 0");
    double z = 2.0 * hop * t;
    return dim * z * z / 2.0;
}

}  // namespace qwalk
