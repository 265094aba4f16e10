#include "qwalk/spin_bath.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "qwalk/bessel.hpp"
#include "qwalk/quadrature.hpp"

namespace qwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kQuadTol = 1e-8;
constexpr int kMaxPoints = 1 << 22;

double j_sq(int n, double x) {
    double j = (n == 0) ? bessel::j0(x) : (n == 1 || n == -1) ? bessel::j1(x) : bessel::jn(n, x);
    return j * j;
}

// mean over [0, 2pi) of f(phi) for either quadrature rule, refined by
// doubling num_points until the change falls below kQuadTol
double phase_mean(const std::function<double(double)>& f, const QuadratureSpec& q) {
    int n0 = std::max(q.num_points, 64);
    if (q.rule == QuadratureSpec::Rule::trapezoid) return quad::periodic_mean(f, n0, kQuadTol);
    int n = n0;
    double prev = 0.0;
    bool have_prev = false;
    while (n <= kMaxPoints) {
        std::vector<double> x, w;
        quad::gauss_legendre(n, x, w);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += w[i] * f(kPi * (x[i] + 1.0));
        double value = acc * kPi / kTwoPi;
        if (have_prev && std::abs(value - prev) <= kQuadTol * std::max(1.0, std::abs(value)))
            return value;
        prev = value;
        have_prev = true;
        n *= 2;
    }
    throw std::runtime_error("spinbath quadrature did not converge after point-doubling cap");
}

// vector-valued trapezoid mean sharing one phase grid across components
Eigen::VectorXd phase_mean_vec(const std::function<void(double, Eigen::VectorXd&)>& accum, int size,
                               const QuadratureSpec& q) {
    int n = std::max(q.num_points, 64);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd buf(size);
    double h = kTwoPi / n;
    for (int i = 0; i < n; ++i) {
        accum(i * h, buf);
        sum += buf;
    }
    Eigen::VectorXd value = sum / n;
    for (int d = 0; n <= kMaxPoints && d < 22; ++d) {
        for (int i = 0; i < n; ++i) {
            accum((i + 0.5) * h, buf);
            sum += buf;
        }
        n *= 2;
        h *= 0.5;
        Eigen::VectorXd next = sum / n;
        double change = (next - value).cwiseAbs().maxCoeff();
        value = next;
        if (change <= kQuadTol) return value;
    }
    throw std::runtime_error("spinbath quadrature did not converge after point-doubling cap");
}

}  // namespace

void SpinBathSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("SpinBathSpec: dim must be >= 1");
    if (lambda < 10.0)
        throw std::invalid_argument(
            "SpinBathSpec: lambda must be >= 10 (only the strong-decoherence limit is modelled)");
    if (quadrature.num_points < 64)
        throw std::invalid_argument("SpinBathSpec: quadrature.num_points must be >= 64");
}

double spinbath_prob(std::span<const int> n, double z, const SpinBathSpec& spec) {
    spec.validate();
    if (static_cast<int>(n.size()) != spec.dim)
        throw std::invalid_argument("spinbath_prob: index dimension mismatch");
    if (z < 0.0) throw std::invalid_argument("spinbath_prob: z must be >= 0");
    int max_abs = 0;
    for (int c : n) max_abs = std::max(max_abs, std::abs(c));
    auto f = [&](double phi) {
        double arg = z * std::cos(phi);
        if (max_abs <= 1) {
            double p = 1.0;
            for (int c : n) p *= j_sq(c, arg);
            return p;
        }
        auto arr = bessel::jn_array(max_abs, std::abs(arg));
        double p = 1.0;
        for (int c : n) {
            double j = arr[std::abs(c)];
            p *= j * j;
        }
        return p;
    };
    return phase_mean(f, spec.quadrature);
}

Eigen::VectorXd spinbath_distribution_1d(int nmax, double z, const SpinBathSpec& spec) {
    spec.validate();
    if (spec.dim != 1) throw std::invalid_argument("spinbath_distribution_1d: spec.dim must be 1");
    if (nmax < 0 || z < 0.0) throw std::invalid_argument("spinbath_distribution_1d: bad arguments");
    auto accum = [&](double phi, Eigen::VectorXd& out) {
        auto arr = bessel::jn_array(nmax, std::abs(z * std::cos(phi)));
        for (int m = -nmax; m <= nmax; ++m) {
            double j = arr[std::abs(m)];
            out[m + nmax] = j * j;
        }
    };
    return phase_mean_vec(accum, 2 * nmax + 1, spec.quadrature);
}

Eigen::VectorXd spinbath_distribution_box(int nmax, double z, const SpinBathSpec& spec) {
    spec.validate();
    if (nmax < 0 || z < 0.0) throw std::invalid_argument("spinbath_distribution_box: bad arguments");
    int side = 2 * nmax + 1;
    long long total = 1;
    for (int mu = 0; mu < spec.dim; ++mu) {
        total *= side;
        if (total > (1LL << 24)) throw std::invalid_argument("spinbath_distribution_box: box too large");
    }
    int size = static_cast<int>(total);
    auto accum = [&](double phi, Eigen::VectorXd& out) {
        auto arr = bessel::jn_array(nmax, std::abs(z * std::cos(phi)));
        std::vector<double> sq(nmax + 1);
        for (int m = 0; m <= nmax; ++m) sq[m] = arr[m] * arr[m];
        for (int idx = 0; idx < size; ++idx) {
            int rem = idx;
            double p = 1.0;
            for (int mu = 0; mu < spec.dim; ++mu) {
                int c = rem % side - nmax;
                rem /= side;
                p *= sq[std::abs(c)];
            }
            out[idx] = p;
        }
    };
    return phase_mean_vec(accum, size, spec.quadrature);
}

ReturnAsymptote spinbath_return_asymptote(int dim) {
    if (dim < 1) throw std::invalid_argument("spinbath_return_asymptote: dim must be >= 1");
    if (dim == 1) return {true, 0.0};  // integral of J_0^2 diverges logarithmically

    // A_d = (1/pi) [ int_0^X J_0^{2d} + tail ], with the tail taken as the
    // integral of the oscillation mean (2/(pi x))^d binom(2d, d)/4^d, valid
    // because J_0^2 ~ 2/(pi x) at large argument. X doubles until stable.
    std::vector<double> nodes, weights;
    quad::gauss_legendre(16, nodes, weights);
    auto f = [dim](double x) {
        double j = bessel::j0(x);
        return std::pow(j * j, dim);
    };
    double binom = 1.0;  // binom(2d, d)
    for (int k = 1; k <= dim; ++k) binom *= static_cast<double>(dim + k) / k;
    double cmean = std::pow(2.0 / kPi, dim) * binom / std::pow(4.0, dim);

    int panels = 512;
    double partial = quad::panel_gauss(f, 0.0, panels * kPi, panels, nodes, weights);
    double prev = 0.0;
    bool have_prev = false;
    for (int iter = 0; iter < 12; ++iter) {
        double x_max = panels * kPi;
        double tail = cmean * std::pow(x_max, 1.0 - dim) / (dim - 1.0);
        double value = (partial + tail) / kPi;
        if (have_prev && std::abs(value - prev) <= 1e-9 * std::abs(value)) return {false, value};
        prev = value;
        have_prev = true;
        partial += quad::panel_gauss(f, x_max, 2.0 * x_max, panels, nodes, weights);
        panels *= 2;
    }
    throw std::runtime_error("spinbath_return_asymptote: range doubling did not converge");
}

double spinbath_msd(int dim, double hop, double t) {
    if (t < 0.0) throw std::invalid_argument("spinbath_msd: t must be >= 0");
    // phase average of the fixed-phase ballistic value d (z cos phi)^2 / 2
    // is d z^2 / 4 = half the free-walk result
    double dt = hop * t;
    return dim * dt * dt;
}

ReturnCurve spinbath_return_curve(int dim, std::span<const double> z_grid, const SpinBathSpec& spec) {
    spec.validate();
    for (std::size_t i = 1; i < z_grid.size(); ++i)
        if (!(z_grid[i] > z_grid[i - 1]))
            throw std::invalid_argument("spinbath_return_curve: z grid must be increasing");
    std::vector<int> origin(dim, 0);
    ReturnCurve out;
    for (double z : z_grid) {
        out.z.push_back(z);
        out.p00.push_back(spinbath_prob(origin, z, spec));
    }
    return out;
}

}  // namespace qwalk
