#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qwalk/oscillator_bath.hpp"

using namespace qwalk;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Mode family engineered so the binned spectral density reproduces a strict
// Ohmic target eta * omega: uniform frequency comb, couplings solved from
// the per-mode weight (pi/2) c^2 / w^2 times the mode density.
std::vector<OscillatorMode> ohmic_comb(int n_modes, double eta, double w_max) {
    std::vector<OscillatorMode> modes;
    double dw = w_max / n_modes;
    for (int q = 0; q < n_modes; ++q) {
        double w = (q + 0.5) * dw;
        double c2 = 2.0 * eta * w * w * w * dw / kPi;
        modes.push_back({w, {std::sqrt(c2), std::sqrt(c2)}});
    }
    return modes;
}

}  // namespace

TEST_CASE("spectral density models") {
    auto ohm = SpectralDensityModel::ohmic(1.0, 10.0);
    CHECK(ohm.value(1.0) == doctest::Approx(std::exp(-0.1)));
    CHECK(ohm.value(11.0) == 0.0);
    CHECK(ohm.value(-1.0) == 0.0);

    auto strict = SpectralDensityModel::strict_ohmic(2.0, 5.0);
    CHECK(strict.value(1.5) == doctest::Approx(3.0));

    CHECK_THROWS_AS(SpectralDensityModel::ohmic(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SpectralDensityModel::tabulated({1.0, 0.5}, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SpectralDensityModel::tabulated({0.5, 1.0}, {1.0, -1.0}),
                    std::invalid_argument);
}

TEST_CASE("spectral_from_modes") {
    SUBCASE("single mode carries full weight in one bin") {
        std::vector<OscillatorMode> modes{{1.0, {1.0, 1.0}}};
        auto j = spectral_from_modes(modes, 0, 1, 0.25);
        // weight = (pi/2) |c c| / w^2 = pi/2 in the bin around w = 1
        double total = 0.0;
        for (std::size_t i = 0; i < j.grid_omega().size(); ++i) total += j.grid_j()[i] * 0.25;
        CHECK(total == doctest::Approx(kPi / 2.0).epsilon(1e-14));
        int nonzero = 0;
        for (double v : j.grid_j())
            if (v != 0.0) ++nonzero;
        CHECK(nonzero == 1);
    }
    SUBCASE("two identical modes double the weight") {
        std::vector<OscillatorMode> one{{1.0, {1.0, 1.0}}};
        std::vector<OscillatorMode> two{{1.0, {1.0, 1.0}}, {1.0, {1.0, 1.0}}};
        auto ja = spectral_from_modes(one, 0, 1, 0.25);
        auto jb = spectral_from_modes(two, 0, 1, 0.25);
        CHECK(jb.value(1.0) == doctest::Approx(2.0 * ja.value(1.0)));
    }
    SUBCASE("1000-mode comb reproduces the Ohmic envelope within 5% per bin") {
        auto modes = ohmic_comb(1000, 0.8, 4.0);
        auto j = spectral_from_modes(modes, 0, 1, 0.2);
        for (std::size_t b = 0; b < j.grid_omega().size(); ++b) {
            double w = j.grid_omega()[b];
            CHECK(j.grid_j()[b] == doctest::Approx(0.8 * w).epsilon(0.05));
        }
    }
    SUBCASE("total weight equals the direct mode sum") {
        auto modes = ohmic_comb(333, 1.3, 2.0);
        auto j = spectral_from_modes(modes, 0, 1, 0.17);
        double binned = 0.0;
        for (double v : j.grid_j()) binned += v * 0.17;
        double direct = 0.0;
        for (const auto& m : modes)
            direct += 0.5 * kPi * std::abs(m.couplings[0] * m.couplings[1]) / (m.omega * m.omega);
        CHECK(binned == doctest::Approx(direct).epsilon(1e-13));
    }
    SUBCASE("input validation") {
        std::vector<OscillatorMode> modes{{1.0, {1.0}}};
        CHECK_THROWS_AS(spectral_from_modes(modes, 0, 1, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(spectral_from_modes({}, 0, 0, 0.1), std::invalid_argument);
        std::vector<OscillatorMode> bad{{-1.0, {1.0, 1.0}}};
        CHECK_THROWS_AS(spectral_from_modes(bad, 0, 1, 0.1), std::invalid_argument);
    }
}

TEST_CASE("induced coupling integral") {
    SUBCASE("strict Ohmic analytic value") {
        auto j = SpectralDensityModel::strict_ohmic(kPi, 2.0);
        CHECK(induced_coupling(j, {1.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("vanishes as the cutoffs merge") {
        auto j = SpectralDensityModel::ohmic(1.0, 5.0);
        CHECK(induced_coupling(j, {4.9999999, 5.0}) < 1e-6);
    }
    SUBCASE("exponential Ohmic against the analytic antiderivative") {
        auto j = SpectralDensityModel::ohmic(1.0, 10.0);
        double expect = (10.0 / kPi) * (std::exp(-0.01) - std::exp(-1.0));  // 1.980429868483
        CHECK(induced_coupling(j, {0.1, 10.0}) == doctest::Approx(expect).epsilon(1e-10));
        CHECK(induced_coupling(j, {0.1, 10.0}) == doctest::Approx(1.980429868483).epsilon(1e-10));
    }
    SUBCASE("cutoff outside support") {
        auto j = SpectralDensityModel::ohmic(1.0, 2.0);
        CHECK_THROWS_AS(induced_coupling(j, {0.5, 3.0}), std::invalid_argument);
        CHECK_THROWS_AS(induced_coupling(j, {-0.5, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(induced_coupling(j, {1.5, 1.0}), std::invalid_argument);
    }
    SUBCASE("monotone decreasing in the reduced cutoff") {
        auto j = SpectralDensityModel::ohmic(1.0, 8.0);
        double prev = induced_coupling(j, {0.05, 8.0});
        for (double cut : {0.2, 0.8, 2.0, 5.0}) {
            double v = induced_coupling(j, {cut, 8.0});
            CHECK(v >= 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
    SUBCASE("binned comb converges to the continuum value") {
        // cubic density: J/omega is curved, so the grid trapezoid has a
        // genuine discretization error that must shrink with the bin width
        double eta = 0.8, w_max = 4.0;
        auto cubic_comb = [&](int n_modes) {
            std::vector<OscillatorMode> modes;
            double dw = w_max / n_modes;
            for (int q = 0; q < n_modes; ++q) {
                double w = (q + 0.5) * dw;
                double c2 = 2.0 * eta * w * w * w * w * w * dw / kPi;  // J = eta w^3
                modes.push_back({w, {std::sqrt(c2), std::sqrt(c2)}});
            }
            return modes;
        };
        CutoffPair cuts{1.0, 3.0};
        double continuum = eta * (27.0 - 1.0) / (3.0 * kPi);  // int eta w^2 / pi
        double err_coarse = std::abs(
            induced_coupling(spectral_from_modes(cubic_comb(8000), 0, 1, 0.4), cuts) - continuum);
        double err_fine = std::abs(
            induced_coupling(spectral_from_modes(cubic_comb(8000), 0, 1, 0.1), cuts) - continuum);
        CHECK(err_fine < 0.5 * err_coarse);  // at least first order in bin width
        CHECK(err_fine < 0.01 * continuum);
    }
}

TEST_CASE("cutoff consistency report") {
    SUBCASE("additivity for a smooth model") {
        auto j = SpectralDensityModel::ohmic(1.7, 6.0);
        auto rep = cutoff_consistency_report(j, 0.3, 2.0, 6.0, 2.0);
        CHECK(rep.additivity_residual < 1e-10);
        CHECK(rep.coupling_to_hop_ratio == doctest::Approx(std::abs(rep.v_full) / 2.0));
    }
    SUBCASE("strict Ohmic derivative is constant -eta/pi") {
        auto j = SpectralDensityModel::strict_ohmic(2.0, 4.0);
        auto rep = cutoff_consistency_report(j, 0.5, 2.0, 4.0);
        for (const auto& s : rep.derivative_samples) {
            CHECK(s.analytic == doctest::Approx(-2.0 / kPi).epsilon(1e-12));
            CHECK(s.numeric == doctest::Approx(-2.0 / kPi).epsilon(1e-6));
        }
    }
    SUBCASE("tabulated additivity is bin-exact at a grid point") {
        auto modes = ohmic_comb(500, 1.0, 3.0);
        auto j = spectral_from_modes(modes, 0, 1, 0.1);
        double mid = j.grid_omega()[14];  // interior grid point
        auto rep = cutoff_consistency_report(j, j.grid_omega()[2], mid, j.grid_omega().back());
        CHECK(rep.additivity_residual < 1e-13);
    }
    SUBCASE("ordering validation") {
        auto j = SpectralDensityModel::ohmic(1.0, 5.0);
        CHECK_THROWS_AS(cutoff_consistency_report(j, 2.0, 1.0, 5.0), std::invalid_argument);
    }
}
