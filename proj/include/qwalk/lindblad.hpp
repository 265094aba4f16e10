#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/ode.hpp"

namespace qwalk {

using DensityMatrix = Eigen::MatrixXcd;
using SparseHamiltonian = Eigen::SparseMatrix<std::complex<double>>;

DensityMatrix node_state(int dim, int node);
DensityMatrix uniform_superposition_state(int dim);

double trace_error(const DensityMatrix& rho);
double hermiticity_residual(const DensityMatrix& rho);
double min_eigenvalue(const DensityMatrix& rho);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

enum class JumpKind { site, qubit, custom };

// Family of jump operators {M_k} with a global rate. The site family is the
// node projectors |j><j| at rate gamma; the qubit family is sigma^z on each
// qubit, applied with the rate gamma/2. Both are diagonal over the node
// basis, so the engine applies them as an elementwise decay mask in O(N^2)
// per step; full operator products are only paid for custom sets.
class JumpOperatorSet {
  public:
    static JumpOperatorSet site_projectors(int num_nodes, double gamma);
    static JumpOperatorSet qubit_dephasing(int num_qubits, double gamma);
    static JumpOperatorSet custom(std::vector<Eigen::MatrixXcd> ops, double gamma);

    JumpKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    int dim() const { return dim_; }
    int count() const;

    // Materialized operator list (intended for tests and small dimensions).
    std::vector<Eigen::MatrixXcd> operators() const;

    // Rate matrix R such that the dissipative term is -R .* rho; only for
    // the diagonal families.
    Eigen::MatrixXd decay_mask() const;

    const std::vector<Eigen::MatrixXcd>& custom_ops() const { return ops_; }

  private:
    JumpOperatorSet(JumpKind kind, double gamma, int dim) : kind_(kind), gamma_(gamma), dim_(dim) {}
    JumpKind kind_;
    double gamma_;
    int dim_;
    int qubits_ = 0;
    std::vector<Eigen::MatrixXcd> ops_;
};

JumpOperatorSet build_site_projectors(const Graph& g, double gamma = 1.0);
JumpOperatorSet build_qubit_dephasing(int num_qubits, double gamma = 1.0);

// D[M] rho = M rho M^dag - (M^dag M rho + rho M^dag M)/2
Eigen::MatrixXcd dissipator_apply(const Eigen::MatrixXcd& m, const DensityMatrix& rho);

// -i[H, rho] + dissipative part (rate prefactors as described on
// JumpOperatorSet). Traceless for any Hermitian rho.
Eigen::MatrixXcd master_rhs(const DensityMatrix& rho, const SparseHamiltonian& h,
                            const JumpOperatorSet& jumps);
Eigen::MatrixXcd master_rhs(const DensityMatrix& rho, const Eigen::MatrixXcd& h,
                            const JumpOperatorSet& jumps);

struct IntegrationDiagnostics {
    double max_trace_drift = 0.0;
    double max_hermiticity_residual = 0.0;  // measured before symmetrization
    long long steps = 0;
    long long rhs_evals = 0;
    long long rejected_steps = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> populations;  // diag(rho) or |psi|^2 per time
    std::vector<DensityMatrix> states;         // full rho, only when requested
    IntegrationDiagnostics diagnostics;

    bool has_states() const { return !states.empty(); }
};

// Master-equation trajectory sampled on the (strictly increasing) grid; the
// initial condition is attached to t_grid.front(). Hermiticity is enforced
// by symmetrization after every accepted step, and a trace drift beyond
// 10 * abs_tol aborts the run.
Trajectory evolve(const DensityMatrix& rho0, const SparseHamiltonian& h, const JumpOperatorSet& jumps,
                  const std::vector<double>& t_grid, const IntegratorConfig& cfg = {},
                  bool store_states = false);
Trajectory evolve(const DensityMatrix& rho0, const Graph& g, const JumpOperatorSet& jumps,
                  const std::vector<double>& t_grid, const IntegratorConfig& cfg = {},
                  bool store_states = false);

// Unitary (pure-state) counterpart for decoherence-free runs; populations
// are |psi_n|^2.
Trajectory schrodinger_evolve(const Eigen::VectorXcd& psi0, const SparseHamiltonian& h,
                              const std::vector<double>& t_grid, const IntegratorConfig& cfg = {});

struct FittedRate {
    double rate = 0.0;
    double residual = 0.0;  // rms deviation of log|rho_mn| from the fit
};

// Least-squares decay rates of log|rho_mn(t)| for every coherence whose
// magnitude stays fittable (>= 1e-12). Meant for zero-Hamiltonian runs where
// the decay is a pure exponential. Requires stored states.
std::map<std::pair<int, int>, FittedRate> offdiag_decay_rates(const Trajectory& traj);

}  // namespace qwalk
