#include "qwalk/lindblad.hpp"

#include <cmath>
#include <stdexcept>

namespace qwalk {

using cd = std::complex<double>;

DensityMatrix node_state(int dim, int node) {
    if (node < 0 || node >= dim) throw std::invalid_argument("node_state: node out of range");
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    rho(node, node) = 1.0;
    return rho;
}

DensityMatrix uniform_superposition_state(int dim) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(dim, cd(1.0 / std::sqrt(double(dim)), 0.0));
    return psi * psi.adjoint();
}

double trace_error(const DensityMatrix& rho) { return std::abs(rho.trace() - cd(1.0, 0.0)); }

double hermiticity_residual(const DensityMatrix& rho) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(0.5 * (rho + rho.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

JumpOperatorSet JumpOperatorSet::site_projectors(int num_nodes, double gamma) {
    if (num_nodes < 1) throw std::invalid_argument("site_projectors: need at least one node");
    if (gamma < 0.0) throw std::invalid_argument("JumpOperatorSet: gamma must be >= 0");
    return JumpOperatorSet(JumpKind::site, gamma, num_nodes);
}

JumpOperatorSet JumpOperatorSet::qubit_dephasing(int num_qubits, double gamma) {
    if (num_qubits < 1) throw std::invalid_argument("qubit_dephasing: need at least one qubit");
    if (gamma < 0.0) throw std::invalid_argument("JumpOperatorSet: gamma must be >= 0");
    JumpOperatorSet s(JumpKind::qubit, gamma, 1 << num_qubits);
    s.qubits_ = num_qubits;
    return s;
}

JumpOperatorSet JumpOperatorSet::custom(std::vector<Eigen::MatrixXcd> ops, double gamma) {
    if (ops.empty()) throw std::invalid_argument("JumpOperatorSet: empty operator list");
    if (gamma < 0.0) throw std::invalid_argument("JumpOperatorSet: gamma must be >= 0");
    int dim = static_cast<int>(ops.front().rows());
    for (const auto& m : ops)
        if (m.rows() != dim || m.cols() != dim)
            throw std::invalid_argument("JumpOperatorSet: operator shape mismatch");
    JumpOperatorSet s(JumpKind::custom, gamma, dim);
    s.ops_ = std::move(ops);
    return s;
}

int JumpOperatorSet::count() const {
    switch (kind_) {
        case JumpKind::site: return dim_;
        case JumpKind::qubit: return qubits_;
        case JumpKind::custom: return static_cast<int>(ops_.size());
    }
    return 0;
}

std::vector<Eigen::MatrixXcd> JumpOperatorSet::operators() const {
    if (kind_ == JumpKind::custom) return ops_;
    std::vector<Eigen::MatrixXcd> out;
    if (kind_ == JumpKind::site) {
        out.reserve(dim_);
        for (int j = 0; j < dim_; ++j) {
            Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim_, dim_);
            p(j, j) = 1.0;
            out.push_back(std::move(p));
        }
    } else {
        out.reserve(qubits_);
        for (int k = 0; k < qubits_; ++k) {
            Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim_, dim_);
            for (int m = 0; m < dim_; ++m) sz(m, m) = ((m >> k) & 1) ? -1.0 : 1.0;
            out.push_back(std::move(sz));
        }
    }
    return out;
}

Eigen::MatrixXd JumpOperatorSet::decay_mask() const {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim_, dim_);
    if (kind_ == JumpKind::site) {
        // sum_j D[|j><j|] rho = diag(rho) - rho: uniform decay off-diagonal
        r.setConstant(gamma_);
        r.diagonal().setZero();
    } else if (kind_ == JumpKind::qubit) {
        // (gamma/2) sum_k (s_k(m) s_k(n) - 1) = -gamma * Hamming(m, n)
        for (int m = 0; m < dim_; ++m)
            for (int n = 0; n < dim_; ++n)
                r(m, n) = gamma_ * hamming_distance(static_cast<unsigned>(m), static_cast<unsigned>(n));
    } else {
        throw std::logic_error("decay_mask: custom jump sets have no diagonal structure");
    }
    return r;
}

JumpOperatorSet build_site_projectors(const Graph& g, double gamma) {
    return JumpOperatorSet::site_projectors(g.num_nodes, gamma);
}

JumpOperatorSet build_qubit_dephasing(int num_qubits, double gamma) {
    return JumpOperatorSet::qubit_dephasing(num_qubits, gamma);
}

Eigen::MatrixXcd dissipator_apply(const Eigen::MatrixXcd& m, const DensityMatrix& rho) {
    if (m.rows() != rho.rows() || m.cols() != rho.cols())
        throw std::invalid_argument("dissipator_apply: shape mismatch");
    Eigen::MatrixXcd mdm = m.adjoint() * m;
    return m * rho * m.adjoint() - 0.5 * (mdm * rho + rho * mdm);
}

namespace {

Eigen::MatrixXcd dissipative_part(const DensityMatrix& rho, const JumpOperatorSet& jumps,
                                  const Eigen::MatrixXcd* mask) {
    if (mask) return -mask->cwiseProduct(rho);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (const auto& m : jumps.custom_ops()) acc += dissipator_apply(m, rho);
    return jumps.gamma() * acc;
}

}  // namespace

Eigen::MatrixXcd master_rhs(const DensityMatrix& rho, const SparseHamiltonian& h,
                            const JumpOperatorSet& jumps) {
    if (rho.rows() != h.rows() || rho.rows() != jumps.dim())
        throw std::invalid_argument("master_rhs: dimension mismatch");
    const cd mi(0.0, -1.0);
    Eigen::MatrixXcd out = mi * (h * rho - rho * h);
    if (jumps.kind() == JumpKind::custom) {
        out += dissipative_part(rho, jumps, nullptr);
    } else {
        Eigen::MatrixXcd mask = jumps.decay_mask().cast<cd>();
        out += dissipative_part(rho, jumps, &mask);
    }
    return out;
}

Eigen::MatrixXcd master_rhs(const DensityMatrix& rho, const Eigen::MatrixXcd& h,
                            const JumpOperatorSet& jumps) {
    return master_rhs(rho, SparseHamiltonian(h.sparseView()), jumps);
}

namespace {

template <class Rhs>
Trajectory integrate_on_grid(DensityMatrix y, const std::vector<double>& t_grid,
                             const IntegratorConfig& cfg, Rhs&& rhs, bool store_states) {
    Trajectory traj;
    traj.times = t_grid;
    StepStats stats;
    IntegrationDiagnostics diag;
    auto post = [&](DensityMatrix& m) {
        diag.max_hermiticity_residual =
            std::max(diag.max_hermiticity_residual, hermiticity_residual(m));
        m = 0.5 * (m + m.adjoint()).eval();
        double drift = trace_error(m);
        diag.max_trace_drift = std::max(diag.max_trace_drift, drift);
        if (cfg.renormalize_trace) m /= m.trace().real();
    };
    auto record = [&](const DensityMatrix& m) {
        traj.populations.push_back(m.diagonal().real());
        if (store_states) traj.states.push_back(m);
    };
    record(y);
    double h_next = 0.0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("evolve: time grid must be strictly increasing");
        if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
            double h = std::isfinite(cfg.max_step) ? cfg.max_step : (t_grid[i] - t_grid[i - 1]);
            ode::rk4_segment(y, t_grid[i - 1], t_grid[i], h, rhs, stats, post);
        } else {
            ode::rk45_segment(y, t_grid[i - 1], t_grid[i], cfg, rhs, stats, h_next, post);
        }
        record(y);
    }
    diag.steps = stats.steps;
    diag.rhs_evals = stats.rhs_evals;
    diag.rejected_steps = stats.rejected;
    traj.diagnostics = diag;
    if (diag.max_trace_drift > 10.0 * cfg.abs_tol && !cfg.renormalize_trace)
        throw std::runtime_error("evolve: trace drift " + std::to_string(diag.max_trace_drift) +
                                 " exceeds 10 * abs_tol");
    return traj;
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const SparseHamiltonian& h, const JumpOperatorSet& jumps,
                  const std::vector<double>& t_grid, const IntegratorConfig& cfg, bool store_states) {
    cfg.validate();
    if (t_grid.empty()) throw std::invalid_argument("evolve: empty time grid");
    int n = static_cast<int>(rho0.rows());
    if (rho0.cols() != n || h.rows() != n || jumps.dim() != n)
        throw std::invalid_argument("evolve: dimension mismatch");
    if (trace_error(rho0) > 1e-10) throw std::invalid_argument("evolve: initial state trace != 1");
    if (hermiticity_residual(rho0) > 1e-10)
        throw std::invalid_argument("evolve: initial state not Hermitian");
    if (jumps.kind() == JumpKind::custom && n > cfg.max_dense_dim)
        throw std::runtime_error("evolve: dimension exceeds max_dense_dim for custom jump sets");

    const cd mi(0.0, -1.0);
    if (jumps.kind() == JumpKind::custom) {
        std::vector<Eigen::MatrixXcd> ops = jumps.custom_ops();
        std::vector<Eigen::MatrixXcd> mdm;
        mdm.reserve(ops.size());
        for (const auto& m : ops) mdm.push_back(m.adjoint() * m);
        auto rhs = [&](double, const DensityMatrix& rho) {
            Eigen::MatrixXcd out = mi * (h * rho - rho * h);
            for (std::size_t k = 0; k < ops.size(); ++k)
                out += jumps.gamma() * (ops[k] * rho * ops[k].adjoint() -
                                        0.5 * (mdm[k] * rho + rho * mdm[k]));
            return out;
        };
        return integrate_on_grid(rho0, t_grid, cfg, rhs, store_states);
    }
    Eigen::MatrixXcd mask = jumps.decay_mask().cast<cd>();
    auto rhs = [&](double, const DensityMatrix& rho) {
        Eigen::MatrixXcd out = mi * (h * rho - rho * h);
        out -= mask.cwiseProduct(rho);
        return out;
    };
    return integrate_on_grid(rho0, t_grid, cfg, rhs, store_states);
}

Trajectory evolve(const DensityMatrix& rho0, const Graph& g, const JumpOperatorSet& jumps,
                  const std::vector<double>& t_grid, const IntegratorConfig& cfg, bool store_states) {
    return evolve(rho0, hamiltonian_sparse(g), jumps, t_grid, cfg, store_states);
}

Trajectory schrodinger_evolve(const Eigen::VectorXcd& psi0, const SparseHamiltonian& h,
                              const std::vector<double>& t_grid, const IntegratorConfig& cfg) {
    cfg.validate();
    if (t_grid.empty()) throw std::invalid_argument("schrodinger_evolve: empty time grid");
    if (psi0.size() != h.rows()) throw std::invalid_argument("schrodinger_evolve: dimension mismatch");
    const cd mi(0.0, -1.0);
    auto rhs = [&](double, const Eigen::VectorXcd& psi) { return Eigen::VectorXcd(mi * (h * psi)); };

    Trajectory traj;
    traj.times = t_grid;
    StepStats stats;
    IntegrationDiagnostics diag;
    Eigen::VectorXcd psi = psi0;
    auto post = [&](Eigen::VectorXcd& v) {
        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(v.squaredNorm() - 1.0));
    };
    traj.populations.push_back(psi.cwiseAbs2());
    double h_next = 0.0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("schrodinger_evolve: time grid must be strictly increasing");
        if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
            double step = std::isfinite(cfg.max_step) ? cfg.max_step : (t_grid[i] - t_grid[i - 1]);
            ode::rk4_segment(psi, t_grid[i - 1], t_grid[i], step, rhs, stats, post);
        } else {
            ode::rk45_segment(psi, t_grid[i - 1], t_grid[i], cfg, rhs, stats, h_next, post);
        }
        traj.populations.push_back(psi.cwiseAbs2());
    }
    diag.steps = stats.steps;
    diag.rhs_evals = stats.rhs_evals;
    diag.rejected_steps = stats.rejected;
    traj.diagnostics = diag;
    return traj;
}

std::map<std::pair<int, int>, FittedRate> offdiag_decay_rates(const Trajectory& traj) {
    if (!traj.has_states())
        throw std::invalid_argument("offdiag_decay_rates: trajectory has no stored states");
    if (traj.times.size() < 2)
        throw std::invalid_argument("offdiag_decay_rates: need at least two samples");
    const double floor = 1e-12;
    int n = static_cast<int>(traj.states.front().rows());
    std::map<std::pair<int, int>, FittedRate> out;
    for (int m = 0; m < n; ++m) {
        for (int k = m + 1; k < n; ++k) {
            std::vector<double> ts, logs;
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                double mag = std::abs(traj.states[i](m, k));
                if (mag < floor) break;  // decayed below the fittable range
                ts.push_back(traj.times[i]);
                logs.push_back(std::log(mag));
            }
            if (ts.size() < 2) continue;  // coherence never fittable
            double n_pts = static_cast<double>(ts.size());
            double st = 0, sl = 0, stt = 0, stl = 0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                st += ts[i];
                sl += logs[i];
                stt += ts[i] * ts[i];
                stl += ts[i] * logs[i];
            }
            double denom = n_pts * stt - st * st;
            if (denom <= 0.0) continue;
            double slope = (n_pts * stl - st * sl) / denom;
            double icept = (sl - slope * st) / n_pts;
            double ss = 0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                double r = logs[i] - (icept + slope * ts[i]);
                ss += r * r;
            }
            out[{m, k}] = FittedRate{-slope, std::sqrt(ss / n_pts)};
        }
    }
    if (out.empty())
        throw std::runtime_error("offdiag_decay_rates: no coherence above the 1e-12 floor");
    return out;
}

}  // namespace qwalk
