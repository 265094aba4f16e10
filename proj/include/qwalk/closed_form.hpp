#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>

#include "qwalk/graph.hpp"

namespace qwalk {

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double norm2() const { return x * x + y * y + z * z; }
};

enum class DampingRegime { underdamped, critical, overdamped };

// Single-qubit dephasing parameters for the Bloch system
//   x' = -gamma x,  y' = 2 hop z - gamma y,  z' = -2 hop y.
class DephasingParams {
  public:
    DephasingParams(double hop, double gamma);

    double hop() const { return hop_; }
    double gamma() const { return gamma_; }
    double r() const { return gamma_ / (4.0 * hop_); }
    DampingRegime regime() const;
    // underdamped oscillation frequency 2*hop*sqrt(1 - r^2)
    double omega() const;
    // overdamped decay rates (gamma +- sqrt(gamma^2 - 16 hop^2)) / 2
    std::pair<double, double> lambda_pm() const;

  private:
    double hop_;
    double gamma_;
};

// Analytic solution of the Bloch system above, exact in all three damping
// regimes (the critical point is the nu -> 0 limit of a common cosh/sinh
// form, so no branch seam).
BlochVector bloch_dephasing(const BlochVector& initial, const DephasingParams& p, double t);

// Free hypercube walker starting at the all-down corner. The per-qubit flip
// angle is theta = hop * t (single-qubit exponential of -hop * sigma_x).
double free_hypercube_prob(int dim, double hop, double t, const BitString& target);
Eigen::VectorXd free_hypercube_distribution(int dim, double hop, double t);

// (P_origin, P_far) = (((1+z)/2)^D, ((1-z)/2)^D) for a product of D
// identical qubits with Bloch z-component z.
std::pair<double, double> hypercube_probs_from_bloch(double z, int dim);

// Free hyperlattice propagator prod_mu J_{n_mu}^2(z), z = 2 hop t.
double free_hyperlattice_prob(std::span<const int> n, double z);

// Ballistic mean-square displacement sum_n |n|^2 P_n(t) = d z^2 / 2.
double free_msd(int dim, double hop, double t);

}  // namespace qwalk
