#pragma once

#include <span>
#include <vector>

namespace qwalk {

// One bath mode: frequency and the per-qubit diagonal couplings.
struct OscillatorMode {
    double omega = 0.0;
    std::vector<double> couplings;
};

// Bath spectral function J(omega) >= 0 on (0, cutoff]. Parametric families
// are eta * omega^s, optionally with an exponential roll-off exp(-w/cutoff);
// tabulated models interpolate linearly on their grid.
class SpectralDensityModel {
  public:
    enum class Kind { parametric, tabulated };

    static SpectralDensityModel ohmic(double eta, double cutoff);         // eta w e^{-w/cutoff}
    static SpectralDensityModel strict_ohmic(double eta, double cutoff);  // eta w, hard support
    static SpectralDensityModel power_law(double eta, double s, double cutoff, bool exp_rolloff = true);
    static SpectralDensityModel tabulated(std::vector<double> omega, std::vector<double> j);

    Kind kind() const { return kind_; }
    double cutoff() const { return cutoff_; }
    double value(double omega) const;  // 0 outside the support

    const std::vector<double>& grid_omega() const { return grid_w_; }
    const std::vector<double>& grid_j() const { return grid_j_; }

  private:
    SpectralDensityModel() = default;
    Kind kind_ = Kind::parametric;
    double eta_ = 0.0, s_ = 1.0, cutoff_ = 0.0;
    bool exp_rolloff_ = true;
    std::vector<double> grid_w_, grid_j_;
};

struct CutoffPair {
    double reduced;  // lowered UV cutoff
    double bare;     // original UV cutoff
    void validate() const;
};

// Bin the delta-comb J(w) = (pi/2) sum_q |c_a(q) c_b(q)| / w_q^2
// delta(w - w_q) into a tabulated model (bin centers as the grid). The
// 1/w_q^2 weight is the on-shell oscillator propagator convention; total
// integrated weight equals the discrete sum.
SpectralDensityModel spectral_from_modes(std::span<const OscillatorMode> modes, int qubit_a,
                                         int qubit_b, double bin_width);

// Induced inter-qubit coupling V = int_{reduced}^{bare} dw J(w) / (pi w).
// Adaptive quadrature for parametric models, trapezoid on the grid for
// tabulated ones.
double induced_coupling(const SpectralDensityModel& j, const CutoffPair& cutoffs);

struct CutoffDerivativeSample {
    double cutoff;
    double analytic;  // -J(w) / (pi w)
    double numeric;   // central difference of V(w, bare)
};

struct CutoffConsistencyReport {
    double v_full;                // V(cut1, bare)
    double v_low;                 // V(cut1, cut2)
    double v_high;                // V(cut2, bare)
    double additivity_residual;   // |v_full - v_low - v_high|
    std::vector<CutoffDerivativeSample> derivative_samples;
    double coupling_to_hop_ratio;  // |v_full| / hop, decoherence relevance
};

// Checks that physics is independent of where the cutoff is drawn: the
// integral must be additive across an intermediate cutoff, and dV/dcutoff
// must match -J/(pi cutoff).
CutoffConsistencyReport cutoff_consistency_report(const SpectralDensityModel& j, double cut1,
                                                  double cut2, double bare, double hop = 1.0);

}  // namespace qwalk
