#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/lindblad.hpp"

namespace qwalk {

struct ObservableSeries {
    std::string label;
    std::vector<double> times;
    std::vector<double> values;
};

struct ClassicalCtrwSpec {
    double rate;  // per-edge hop rate
};

// Node distribution at a sampled time. With interpolate=false the time must
// hit a grid point; otherwise linear interpolation between neighbours.
Eigen::VectorXd distribution_at(const Trajectory& traj, double t, bool interpolate = false);

// sum_n |n|^2 P_n over lattice labels.
double mean_square_displacement(const Eigen::VectorXd& dist,
                                std::span<const std::vector<int>> labels);
double mean_square_displacement(const Eigen::VectorXd& dist, const Graph& g);

// Classical continuous-time random walk dP/dt = rate * (A - deg) P on the
// graph (unweighted adjacency). Returns a Trajectory whose populations are
// the probability vectors.
Trajectory classical_ctrw_evolve(const Graph& g, const ClassicalCtrwSpec& spec,
                                 const Eigen::VectorXd& p0, const std::vector<double>& t_grid,
                                 const IntegratorConfig& cfg = {});

struct ExponentFit {
    double exponent = 0.0;
    double residual = 0.0;  // rms log-space residual
};

// Least-squares slope of log(value) vs log(t) over times in [t_lo, t_hi].
// Throws on non-positive data inside the window.
ExponentFit exponent_fit(const ObservableSeries& series, double t_lo, double t_hi);

// Sliding-window mean (trapezoid weighted, so nonuniform grids are fine);
// used to smooth oscillatory return probabilities before a power-law fit.
ObservableSeries envelope_average(const ObservableSeries& series, double window);

struct ZenoScanResult {
    std::vector<double> gammas;
    std::vector<double> p_origin;  // P_00(t_probe) per gamma
    int min_index = 0;
};

// P_00(t_probe) under site-based monitoring for each rate in gammas
// (ascending, gamma = 0 runs the unitary walker). min_index reports the
// turning point of the Zeno crossover.
ZenoScanResult zeno_scan(const Graph& g, std::span<const double> gammas, double t_probe,
                         const IntegratorConfig& cfg = {});

}  // namespace qwalk
