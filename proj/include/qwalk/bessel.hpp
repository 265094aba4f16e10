#pragma once

#include <vector>

namespace qwalk::bessel {

// Bessel functions of the first kind, integer order. Target accuracy is
// 1e-12 relative on the oscillatory range used by the lattice propagators
// (|n| up to a few times the argument).
double j0(double x);
double j1(double x);
double jn(int n, double x);

// J_0(x) .. J_nmax(x) in one downward-recurrence pass. Negative x is
// handled by the parity J_n(-x) = (-1)^n J_n(x).
std::vector<double> jn_array(int nmax, double x);

}  // namespace qwalk::bessel
