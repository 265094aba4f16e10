#include "qwalk/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace qwalk::bessel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Ascending power series around x = 0. Safe (no cancellation blow-up) for
// small |x|; used as the fallback where the recurrences degrade.
double series_jn(int n, double x) {
    double half = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k;  // (x/2)^n / n!
    double sum = term;
    double m4 = -half * half;
    for (int k = 1; k < 64; ++k) {
        term *= m4 / (static_cast<double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel asymptotic expansion for orders 0 and 1, large argument.
// J_n(x) = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)], chi = x - n pi/2 - pi/4.
double hankel_j01(int n, double x) {
    double mu = 4.0 * n * n;
    double p = 1.0, q = 0.0;
    double a = 1.0;
    double sp = -1.0, sq = 1.0;
    for (int k = 1; k <= 24; ++k) {
        double odd = 2.0 * k - 1.0;
        double next = a * (mu - odd * odd) / (8.0 * x * k);
        if (std::abs(next) >= std::abs(a) && k > 2) break;  // past optimal truncation
        a = next;
        if (k % 2 == 1) {
            q += sq * a;
            sq = -sq;
        } else {
            p += sp * a;
            sp = -sp;
        }
        if (std::abs(a) < 1e-18) break;
    }
    double chi = x - 0.5 * n * kPi - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Start index for the downward (Miller) recurrence. The extra margin covers
// the slowly-decaying turning region near order ~ x.
int miller_start(int nmax, double x) {
    int base = std::max(nmax, static_cast<int>(std::ceil(x)));
    int m = base + 64 + static_cast<int>(9.0 * std::cbrt(x));
    return m + (m & 1);  // even, so the normalization sum sees the top index
}

// Downward recurrence with the normalization J_0 + 2 sum_{k even} J_k = 1.
// Requires x > 0; fills out[0..nmax].
void miller_array(int nmax, double x, std::vector<double>& out) {
    int m = miller_start(nmax, x);
    double jkp1 = 0.0;
    double jk = 1e-30;
    double norm = 2.0 * jk;  // start index is even
    for (int k = m; k >= 1; --k) {
        double jkm1 = (2.0 * k / x) * jk - jkp1;
        jkp1 = jk;
        jk = jkm1;
        int idx = k - 1;
        if (idx <= nmax) out[idx] = jk;
        if (idx == 0)
            norm += jk;
        else if (idx % 2 == 0)
            norm += 2.0 * jk;
        if (std::abs(jk) > 1e250) {
            const double scale = 1e-250;
            jk *= scale;
            jkp1 *= scale;
            norm *= scale;
            for (int i = std::min(idx, nmax); i <= nmax; ++i) out[i] *= scale;
        }
    }
    double inv = 1.0 / norm;
    for (int i = 0; i <= nmax; ++i) out[i] *= inv;
}

double j01_impl(int n, double x) {
    double ax = std::abs(x);
    double sign = (x < 0.0 && n == 1) ? -1.0 : 1.0;
    if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
    if (ax < 0.1) return sign * series_jn(n, ax);
    if (ax >= 25.0) return sign * hankel_j01(n, ax);
    std::vector<double> buf(2, 0.0);
    miller_array(1, ax, buf);
    return sign * buf[n];
}

}  // namespace

double j0(double x) { return j01_impl(0, x); }

double j1(double x) { return j01_impl(1, x); }

double jn(int n, double x) {
    if (n < 0) {
        double v = jn(-n, x);
        return (n % 2 == 0) ? v : -v;
    }
    double sign = 1.0;
    if (x < 0.0) {
        x = -x;
        if (n % 2 == 1) sign = -1.0;
    }
    if (n <= 1) return sign * j01_impl(n, x);
    if (x == 0.0) return 0.0;
    if (x < 0.1) return sign * series_jn(n, x);
    if (x >= 25.0 && static_cast<double>(n) < 0.5 * x) {
        // Upward recurrence is stable below the turning point.
        double jm = hankel_j01(0, x);
        double jc = hankel_j01(1, x);
        for (int k = 1; k < n; ++k) {
            double jp = (2.0 * k / x) * jc - jm;
            jm = jc;
            jc = jp;
        }
        return sign * jc;
    }
    std::vector<double> buf(n + 1, 0.0);
    miller_array(n, x, buf);
    return sign * buf[n];
}

std::vector<double> jn_array(int nmax, double x) {
    if (nmax < 0) throw std::invalid_argument("jn_array: nmax must be >= 0");
    std::vector<double> out(nmax + 1, 0.0);
    double ax = std::abs(x);
    if (ax == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (ax < 0.1) {
        for (int n = 0; n <= nmax; ++n) out[n] = series_jn(n, ax);
    } else {
        miller_array(nmax, ax, out);
    }
    if (x < 0.0)
        for (int n = 1; n <= nmax; n += 2) out[n] = -out[n];
    return out;
}

}  // namespace qwalk::bessel
