#include "qwalk/oscillator_bath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qwalk/quadrature.hpp"

namespace qwalk {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpectralDensityModel SpectralDensityModel::power_law(double eta, double s, double cutoff,
                                                     bool exp_rolloff) {
    if (!(eta >= 0.0)) throw std::invalid_argument("SpectralDensityModel: eta must be >= 0");
    if (!(cutoff > 0.0)) throw std::invalid_argument("SpectralDensityModel: cutoff must be > 0");
    if (!(s > 0.0)) throw std::invalid_argument("SpectralDensityModel: exponent must be > 0");
    SpectralDensityModel m;
    m.kind_ = Kind::parametric;
    m.eta_ = eta;
    m.s_ = s;
    m.cutoff_ = cutoff;
    m.exp_rolloff_ = exp_rolloff;
    return m;
}

SpectralDensityModel SpectralDensityModel::ohmic(double eta, double cutoff) {
    return power_law(eta, 1.0, cutoff, true);
}

SpectralDensityModel SpectralDensityModel::strict_ohmic(double eta, double cutoff) {
    return power_law(eta, 1.0, cutoff, false);
}

SpectralDensityModel SpectralDensityModel::tabulated(std::vector<double> omega,
                                                     std::vector<double> j) {
    if (omega.size() != j.size() || omega.empty())
        throw std::invalid_argument("SpectralDensityModel: tabulated grids must match and be non-empty");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (i > 0 && !(omega[i] > omega[i - 1]))
            throw std::invalid_argument("SpectralDensityModel: omega grid must be strictly increasing");
        if (!(omega[i] > 0.0)) throw std::invalid_argument("SpectralDensityModel: omega must be > 0");
        if (j[i] < 0.0) throw std::invalid_argument("SpectralDensityModel: J must be >= 0");
    }
    SpectralDensityModel m;
    m.kind_ = Kind::tabulated;
    m.cutoff_ = omega.back();
    m.grid_w_ = std::move(omega);
    m.grid_j_ = std::move(j);
    return m;
}

double SpectralDensityModel::value(double w) const {
    if (kind_ == Kind::parametric) {
        if (w <= 0.0 || w > cutoff_) return 0.0;
        double v = eta_ * std::pow(w, s_);
        return exp_rolloff_ ? v * std::exp(-w / cutoff_) : v;
    }
    if (w < grid_w_.front() || w > grid_w_.back()) return 0.0;
    auto it = std::lower_bound(grid_w_.begin(), grid_w_.end(), w);
    std::size_t hi = it - grid_w_.begin();
    if (hi == 0) return grid_j_.front();
    double t = (w - grid_w_[hi - 1]) / (grid_w_[hi] - grid_w_[hi - 1]);
    return grid_j_[hi - 1] + t * (grid_j_[hi] - grid_j_[hi - 1]);
}

void CutoffPair::validate() const {
    if (!(reduced > 0.0) || !(reduced < bare))
        throw std::invalid_argument("CutoffPair: need 0 < reduced < bare");
}

SpectralDensityModel spectral_from_modes(std::span<const OscillatorMode> modes, int qubit_a,
                                         int qubit_b, double bin_width) {
    if (modes.empty()) throw std::invalid_argument("spectral_from_modes: empty mode list");
    if (!(bin_width > 0.0)) throw std::invalid_argument("spectral_from_modes: bin_width must be > 0");
    double w_max = 0.0;
    for (const auto& m : modes) {
        if (!(m.omega > 0.0)) throw std::invalid_argument("spectral_from_modes: omega must be > 0");
        if (qubit_a < 0 || qubit_b < 0 || qubit_a >= static_cast<int>(m.couplings.size()) ||
            qubit_b >= static_cast<int>(m.couplings.size()))
            throw std::invalid_argument("spectral_from_modes: qubit index out of range");
        w_max = std::max(w_max, m.omega);
    }
    int bins = static_cast<int>(std::floor(w_max / bin_width)) + 1;
    std::vector<double> weight(bins, 0.0);
    for (const auto& m : modes) {
        int b = std::min(static_cast<int>(m.omega / bin_width), bins - 1);
        weight[b] += 0.5 * kPi * std::abs(m.couplings[qubit_a] * m.couplings[qubit_b]) /
                     (m.omega * m.omega);
    }
    std::vector<double> grid(bins), j(bins);
    for (int b = 0; b < bins; ++b) {
        grid[b] = (b + 0.5) * bin_width;
        j[b] = weight[b] / bin_width;
    }
    return SpectralDensityModel::tabulated(std::move(grid), std::move(j));
}

namespace {

// trapezoid of J/(pi w) on the tabulated grid restricted to [lo, hi], with
// interpolated endpoints so splits at interior cutoffs stay additive
double tabulated_coupling(const SpectralDensityModel& m, double lo, double hi) {
    const auto& w = m.grid_omega();
    auto f_at = [&](double x) { return m.value(x) / (kPi * x); };
    std::vector<double> xs{lo};
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > lo && w[i] < hi) xs.push_back(w[i]);
    xs.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        acc += 0.5 * (f_at(xs[i - 1]) + f_at(xs[i])) * (xs[i] - xs[i - 1]);
    return acc;
}

}  // namespace

double induced_coupling(const SpectralDensityModel& j, const CutoffPair& cutoffs) {
    cutoffs.validate();
    if (cutoffs.bare > j.cutoff() * (1.0 + 1e-12))
        throw std::invalid_argument("induced_coupling: cutoff outside the spectral support");
    if (j.kind() == SpectralDensityModel::Kind::tabulated)
        return tabulated_coupling(j, cutoffs.reduced, cutoffs.bare);
    auto f = [&](double w) { return j.value(w) / (kPi * w); };
    return quad::adaptive_simpson(f, cutoffs.reduced, cutoffs.bare, 1e-12);
}

CutoffConsistencyReport cutoff_consistency_report(const SpectralDensityModel& j, double cut1,
                                                  double cut2, double bare, double hop) {
    if (!(cut1 > 0.0 && cut1 < cut2 && cut2 < bare))
        throw std::invalid_argument("cutoff_consistency_report: need 0 < cut1 < cut2 < bare");
    CutoffConsistencyReport rep;
    rep.v_full = induced_coupling(j, {cut1, bare});
    rep.v_low = induced_coupling(j, {cut1, cut2});
    rep.v_high = induced_coupling(j, {cut2, bare});
    rep.additivity_residual = std::abs(rep.v_full - rep.v_low - rep.v_high);
    for (double c : {cut1, cut2}) {
        double h = 1e-5 * c;
        double vp = induced_coupling(j, {c + h, bare});
        double vm = induced_coupling(j, {c - h, bare});
        rep.derivative_samples.push_back(
            {c, -j.value(c) / (kPi * c), (vp - vm) / (2.0 * h)});
    }
    rep.coupling_to_hop_ratio = hop != 0.0 ? std::abs(rep.v_full / hop) : 0.0;
    return rep;
}

}  // namespace qwalk
