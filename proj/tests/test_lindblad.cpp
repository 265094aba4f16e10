#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "qwalk/closed_form.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/lindblad.hpp"

using namespace qwalk;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd sigma_z2() {
    Eigen::MatrixXcd s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("dissipator algebra") {
    Eigen::MatrixXcd rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;

    SUBCASE("identity annihilates") {
        CHECK(dissipator_apply(Eigen::MatrixXcd::Identity(2, 2), rho).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("sigma_z on the plus state") {
        Eigen::MatrixXcd expect(2, 2);
        expect << 0, -1, -1, 0;
        CHECK(dissipator_apply(sigma_z2(), rho).isApprox(expect, 1e-14));
    }
    SUBCASE("projector onto |0>") {
        Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(2, 2);
        p0(0, 0) = 1.0;
        Eigen::MatrixXcd expect(2, 2);
        expect << 0, -0.25, -0.25, 0;
        CHECK(dissipator_apply(p0, rho).isApprox(expect, 1e-14));
    }
    SUBCASE("traceless and Hermitian for Hermitian input") {
        Eigen::MatrixXcd m(2, 2);
        m << cd(0.3, 0.1), cd(-1.0, 0.4), cd(0.2, 0.0), cd(0.9, -0.7);
        auto d = dissipator_apply(m, rho);
        CHECK(std::abs(d.trace()) < 1e-14);
        CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(dissipator_apply(Eigen::MatrixXcd::Identity(3, 3), rho),
                        std::invalid_argument);
    }
}

TEST_CASE("master equation right-hand side") {
    Graph g1 = build_hypercube({1, 1.0});
    DensityMatrix rho = uniform_superposition_state(2);

    SUBCASE("gamma = 0 leaves the pure commutator") {
        auto jumps = build_qubit_dephasing(1, 0.0);
        Eigen::MatrixXcd h = hamiltonian_matrix(g1);
        Eigen::MatrixXcd expect = cd(0, -1) * (h * rho - rho * h);
        CHECK(master_rhs(rho, h, jumps).isApprox(expect, 1e-14));
    }
    SUBCASE("qubit kind at H = 0: coherence derivative -gamma rho01") {
        auto jumps = build_qubit_dephasing(1, 0.8);
        Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(2, 2);
        auto out = master_rhs(rho, h0, jumps);
        CHECK(out(0, 1).real() == doctest::Approx(-0.8 * 0.5).epsilon(1e-14));
        CHECK(std::abs(out(0, 1).imag()) < 1e-15);
        CHECK(std::abs(out(0, 0)) < 1e-15);
    }
    SUBCASE("site kind coincides for a single qubit") {
        auto site = JumpOperatorSet::site_projectors(2, 0.8);
        Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(2, 2);
        auto a = master_rhs(rho, h0, site);
        auto b = master_rhs(rho, h0, build_qubit_dephasing(1, 0.8));
        CHECK(a.isApprox(b, 1e-14));
    }
    SUBCASE("mask path equals the explicit operator sum") {
        Graph g = build_hypercube({3, 0.9});
        DensityMatrix r = uniform_superposition_state(8);
        for (auto jumps : {build_qubit_dephasing(3, 0.6), build_site_projectors(g, 0.6)}) {
            double pref = jumps.kind() == JumpKind::qubit ? 0.3 : 0.6;  // gamma/2 vs gamma
            Eigen::MatrixXcd h = hamiltonian_matrix(g);
            Eigen::MatrixXcd expect = cd(0, -1) * (h * r - r * h);
            for (const auto& m : jumps.operators()) expect += pref * dissipator_apply(m, r);
            CHECK(master_rhs(r, h, jumps).isApprox(expect, 1e-13));
            CHECK(std::abs(master_rhs(r, h, jumps).trace()) < 1e-14);
        }
    }
}

TEST_CASE("jump operator families") {
    SUBCASE("site projectors resolve the identity") {
        auto set = JumpOperatorSet::site_projectors(4, 1.0);
        CHECK(set.count() == 4);
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(4, 4);
        for (const auto& m : set.operators()) {
            sum += m;
            CHECK(m.isApprox(m * m, 1e-15));  // rank-1 projectors
        }
        CHECK(sum.isApprox(Eigen::MatrixXcd::Identity(4, 4)));
    }
    SUBCASE("qubit dephasing operators") {
        auto set = build_qubit_dephasing(2, 1.0);
        auto ops = set.operators();
        REQUIRE(ops.size() == 2);
        Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd a = kron(id2, sigma_z2());
        Eigen::MatrixXcd b = kron(sigma_z2(), id2);
        bool match_direct = ops[0].isApprox(a) && ops[1].isApprox(b);
        bool match_swapped = ops[0].isApprox(b) && ops[1].isApprox(a);
        CHECK((match_direct || match_swapped));
        for (const auto& m : ops)
            CHECK((m * m).isApprox(Eigen::MatrixXcd::Identity(4, 4), 1e-15));
    }
    SUBCASE("D=1 set is sigma_z") {
        auto ops = build_qubit_dephasing(1, 1.0).operators();
        REQUIRE(ops.size() == 1);
        CHECK(ops[0].isApprox(sigma_z2()));
    }
}

TEST_CASE("engine: unitary limit matches the closed-form propagator") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    for (int dim : {3, 4}) {
        Graph g = build_hypercube({dim, 1.0});
        auto jumps = build_qubit_dephasing(dim, 0.0);
        auto grid = linspace(0.0, 10.0, 26);
        auto traj = evolve(node_state(1 << dim, 0), g, jumps, grid, cfg);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto closed = free_hypercube_distribution(dim, 1.0, grid[i]);
            CHECK((traj.populations[i] - closed).cwiseAbs().maxCoeff() < 1e-8);
        }
        CHECK(traj.diagnostics.max_trace_drift < 1e-10);
    }
}

TEST_CASE("engine: D=1 dephasing matches the bloch closed form") {
    Graph g = build_hypercube({1, 1.0});
    auto jumps = build_qubit_dephasing(1, 2.0);
    auto grid = linspace(0.0, 1.0, 11);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    auto traj = evolve(node_state(2, 0), g, jumps, grid, cfg);
    // z(t) = p0 - p1
    double z1 = traj.populations.back()[0] - traj.populations.back()[1];
    CHECK(z1 == doctest::Approx(0.150574365146).epsilon(1e-7));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        BlochVector v = bloch_dephasing({0, 0, 1}, DephasingParams(1.0, 2.0), grid[i]);
        CHECK(traj.populations[i][0] == doctest::Approx(0.5 * (1 + v.z)).epsilon(1e-8));
    }
}

TEST_CASE("engine: dephased hypercube relaxes through damped oscillations to 1/8") {
    // D = 3 at moderate qubit dephasing: the return probability follows the
    // product rule ((1+z)/2)^3 with the single-qubit z(t), oscillates, and
    // settles at the uniform value
    Graph g = build_hypercube({3, 1.0});
    auto grid = linspace(0.0, 12.0, 49);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    auto traj = evolve(node_state(8, 0), g, build_qubit_dephasing(3, 0.5), grid, cfg);
    DephasingParams p(1.0, 0.5);
    int sign_changes = 0;
    double prev_diff = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double z = bloch_dephasing({0, 0, 1}, p, grid[i]).z;
        auto [p00, pfar] = hypercube_probs_from_bloch(z, 3);
        CHECK(traj.populations[i][0] == doctest::Approx(p00).epsilon(1e-6).scale(1.0));
        CHECK(traj.populations[i][7] == doctest::Approx(pfar).epsilon(1e-6).scale(1.0));
        double diff = traj.populations[i][0] - 0.125;
        if (i > 0 && diff * prev_diff < 0.0) ++sign_changes;
        prev_diff = diff;
    }
    CHECK(sign_changes >= 3);  // oscillates about 1/8
    CHECK(traj.populations.back()[0] == doctest::Approx(0.125).epsilon(0.02));
}

TEST_CASE("engine: site and qubit dephasing coincide for one qubit") {
    Graph g = build_hypercube({1, 1.0});
    auto grid = linspace(0.0, 2.0, 9);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    DensityMatrix rho0(2, 2);
    rho0 << 0.7, cd(0.2, 0.1), cd(0.2, -0.1), 0.3;
    auto ta = evolve(rho0, g, JumpOperatorSet::site_projectors(2, 1.3), grid, cfg, true);
    auto tb = evolve(rho0, g, build_qubit_dephasing(1, 1.3), grid, cfg, true);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK((ta.states[i] - tb.states[i]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("engine: qubit-kind factorizes into single-qubit products") {
    const int dim = 4;
    Graph g = build_hypercube({dim, 0.8});
    Graph g1 = build_hypercube({1, 0.8});
    auto grid = linspace(0.0, 2.0, 6);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    auto full = evolve(node_state(1 << dim, 0), g, build_qubit_dephasing(dim, 0.5), grid, cfg, true);
    auto one = evolve(node_state(2, 0), g1, build_qubit_dephasing(1, 0.5), grid, cfg, true);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Eigen::MatrixXcd prod = one.states[i];
        for (int k = 1; k < dim; ++k) prod = kron(prod, one.states[i]);
        CHECK((full.states[i] - prod).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("engine: conservation properties on a generic run") {
    Graph g = build_hypercube({2, 1.0});
    auto grid = linspace(0.0, 4.0, 17);
    auto traj = evolve(node_state(4, 0), g, build_site_projectors(g, 0.7), grid, {}, true);
    CHECK(traj.diagnostics.max_trace_drift < 1e-9);
    CHECK(traj.diagnostics.max_hermiticity_residual < 1e-10);
    for (const auto& rho : traj.states) {
        CHECK(trace_error(rho) < 1e-9);
        CHECK(min_eigenvalue(rho) > -1e-7);
    }
}

TEST_CASE("engine: custom jump set and dimension cap") {
    Graph g = build_hypercube({1, 1.0});
    std::vector<Eigen::MatrixXcd> ops{sigma_z2()};
    auto custom = JumpOperatorSet::custom(ops, 0.4);  // sigma_z at rate gamma
    auto qubit = build_qubit_dephasing(1, 0.8);       // same generator: gamma/2 * 2
    auto grid = linspace(0.0, 1.5, 7);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    auto ta = evolve(node_state(2, 0), g, custom, grid, cfg, true);
    auto tb = evolve(node_state(2, 0), g, qubit, grid, cfg, true);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK((ta.states[i] - tb.states[i]).cwiseAbs().maxCoeff() < 1e-10);

    IntegratorConfig small;
    small.max_dense_dim = 1;
    CHECK_THROWS_AS(evolve(node_state(2, 0), g, custom, grid, small), std::runtime_error);
}

TEST_CASE("engine: fixed-step integration is bit reproducible") {
    Graph g = build_hypercube({2, 1.0});
    IntegratorConfig cfg;
    cfg.method = IntegratorConfig::Method::rk4_fixed;
    cfg.max_step = 0.01;
    auto grid = linspace(0.0, 1.0, 5);
    auto a = evolve(node_state(4, 0), g, build_qubit_dephasing(2, 0.3), grid, cfg);
    auto b = evolve(node_state(4, 0), g, build_qubit_dephasing(2, 0.3), grid, cfg);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK((a.populations[i] - b.populations[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("engine: adaptive failure reports the offending time") {
    Graph g = build_hypercube({1, 1.0});
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-3;
    cfg.abs_tol = 1e-300;
    // stiffness so extreme that the stable step is below the underflow floor
    auto jumps = build_qubit_dephasing(1, 1e16);
    std::vector<double> grid{0.0, 1.0};
    CHECK_THROWS_WITH_AS(evolve(uniform_superposition_state(2), g, jumps, grid, cfg),
                         doctest::Contains("underflow at t"), std::runtime_error);
}

TEST_CASE("coherence decay rates") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;

    SUBCASE("qubit kind: rate = gamma * Hamming distance") {
        Graph g = build_hypercube({2, 0.0});
        auto grid = linspace(0.0, 2.0, 21);
        auto traj = evolve(uniform_superposition_state(4), g, build_qubit_dephasing(2, 1.0), grid,
                           cfg, true);
        auto rates = offdiag_decay_rates(traj);
        CHECK(rates.at({0, 3}).rate == doctest::Approx(2.0).epsilon(1e-8));  // 00 vs 11
        CHECK(rates.at({0, 1}).rate == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(rates.at({1, 2}).rate == doctest::Approx(2.0).epsilon(1e-8));
        for (const auto& [pair, fit] : rates) CHECK(fit.residual < 1e-6);
    }
    SUBCASE("site kind: uniform rate gamma") {
        Graph g = build_hypercube({2, 0.0});
        auto grid = linspace(0.0, 2.0, 21);
        auto traj = evolve(uniform_superposition_state(4), g,
                           JumpOperatorSet::site_projectors(4, 1.0), grid, cfg, true);
        for (const auto& [pair, fit] : offdiag_decay_rates(traj))
            CHECK(fit.rate == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("three clusters at D = 3") {
        Graph g = build_hypercube({3, 0.0});
        auto grid = linspace(0.0, 3.0, 16);
        auto traj = evolve(uniform_superposition_state(8), g, build_qubit_dephasing(3, 0.5), grid,
                           cfg, true);
        for (const auto& [pair, fit] : offdiag_decay_rates(traj)) {
            int c = hamming_distance(static_cast<unsigned>(pair.first),
                                     static_cast<unsigned>(pair.second));
            CHECK(fit.rate == doctest::Approx(0.5 * c).epsilon(1e-7));
        }
    }
    SUBCASE("requires stored states") {
        Graph g = build_hypercube({1, 0.0});
        auto traj = evolve(uniform_superposition_state(2), g, build_qubit_dephasing(1, 1.0),
                           linspace(0.0, 1.0, 5), cfg, false);
        CHECK_THROWS_AS(offdiag_decay_rates(traj), std::invalid_argument);
    }
}

TEST_CASE("initial state constructors and checks") {
    auto rho = node_state(4, 2);
    CHECK(rho(2, 2) == cd(1, 0));
    CHECK(trace_error(rho) == 0.0);
    CHECK_THROWS_AS(node_state(4, 4), std::invalid_argument);

    auto u = uniform_superposition_state(4);
    CHECK(trace_error(u) < 1e-15);
    CHECK(u(0, 3).real() == doctest::Approx(0.25));
    CHECK(min_eigenvalue(u) > -1e-14);

    DensityMatrix bad = DensityMatrix::Identity(2, 2);  // trace 2
    Graph g = build_hypercube({1, 1.0});
    CHECK_THROWS_AS(evolve(bad, g, build_qubit_dephasing(1, 0.0), {0.0, 1.0}, {}),
                    std::invalid_argument);
}
