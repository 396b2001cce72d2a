#pragma once

// Independent reference computations for tests and `excircle verify`.
//
// None of these call into the code they check: the Bessel oracle has its own
// series, the g_1 oracle integrates the defining Fourier integral, and the
// radial quadrature uses Boost's Gauss-Legendre tables rather than
// excircle::quad.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "excircle/errors.hpp"

namespace excircle::oracle {

using Complex = std::complex<double>;

struct OracleResult {
    Complex value;
    double estimated_error = 0.0;
    std::string method;

    double real() const { return value.real(); }
};

// ---------------------------------------------------------------------------
// Bessel closed form for constant potentials

namespace detail {

// sum_j (x^2/4)^j / (j! (j+n)!)  =  I_n(x) / (x/2)^n
inline double scaled_bessel_i(int n, double x, double* last_term = nullptr) {
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    const double y = 0.25 * x * x;
    double term = 1.0 / fact;
    double sum = term;
    for (int j = 1; j < 1000; ++j) {
        term *= y / (j * static_cast<double>(j + n));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    if (last_term) *last_term = term;
    return sum;
}

}  // namespace detail

/// mu_n for q == c on the unit disc: sqrt(c) I_n'(sqrt c) / I_n(sqrt c)
/// = n + x I_{n+1}(x)/I_n(x), x = sqrt(c).
inline OracleResult bessel_dn_oracle(double c, int n) {
    if (!(c > 0.0)) throw DomainError("bessel_dn_oracle: c must be positive");
    if (n < 0) throw ParameterError("bessel_dn_oracle: n must be nonnegative");
    const double x = std::sqrt(c);
    double tail = 0.0;
    const double in = detail::scaled_bessel_i(n, x, &tail);
    const double in1 = detail::scaled_bessel_i(n + 1, x);
    const double mu = n + x * (0.5 * x) * in1 / in;
    return {mu, 4e-16 * std::max(1.0, std::abs(mu)) + tail, "bessel-series"};
}

// ---------------------------------------------------------------------------
// Direct quadrature of g_1(z) = (2pi)^-2 int e^{i xi.z} / (xi (conj(xi) + 2)) dxi

namespace detail {

struct DeNode {
    double t_offset;  // distance to the nearer endpoint, for singular integrands
    double x;
    double w;
};

// tanh-sinh nodes on [a, b] with step h, |t| <= tmax.
inline std::vector<DeNode> tanh_sinh(double a, double b, double h, double tmax = 3.2) {
    std::vector<DeNode> nodes;
    const double half = 0.5 * (b - a);
    const int kmax = static_cast<int>(std::ceil(tmax / h));
    for (int i = -kmax; i <= kmax; ++i) {
        const double t = i * h;
        const double u = 0.5 * std::numbers::pi * std::sinh(t);
        const double cu = std::cosh(u);
        const double w = h * half * 0.5 * std::numbers::pi * std::cosh(t) / (cu * cu);
        // distance to the nearer endpoint without cancellation
        const double d = (b - a) / (1.0 + std::exp(2.0 * std::abs(u)));
        const double x = t < 0 ? a + d : b - d;
        if (w < 1e-300 || d <= 0.0) continue;
        nodes.push_back({d, x, w});
    }
    return nodes;
}

// exp-sinh nodes on [0, inf).
inline std::vector<DeNode> exp_sinh(double h, double tmax = 4.5) {
    std::vector<DeNode> nodes;
    const int kmax = static_cast<int>(std::ceil(tmax / h));
    for (int i = -kmax; i <= kmax; ++i) {
        const double t = i * h;
        const double x = std::exp(0.5 * std::numbers::pi * std::sinh(t));
        const double w = h * 0.5 * std::numbers::pi * std::cosh(t) * x;
        nodes.push_back({x, x, w});
    }
    return nodes;
}

// int_0^inf e^{i c rho} / (a rho + 2) drho, a = e^{-i phi}, c != 0, by moving
// the ray into the half plane where e^{i c rho} decays.
inline Complex radial_integral(double phi, double c, double h) {
    const Complex a = std::polar(1.0, -phi);
    const Complex pole = -2.0 / a;
    const double pole_angle = std::arg(pole);
    const int sgn = c > 0 ? 1 : -1;
    const double ac = std::abs(c);

    // Ray angle in (0, pi/2], kept away from the pole direction.
    double beta = 0.5 * std::numbers::pi;
    double best = -1.0;
    for (double cand : {0.5 * std::numbers::pi, 0.375 * std::numbers::pi, 0.25 * std::numbers::pi}) {
        const double gap = std::abs(std::remainder(pole_angle - sgn * cand, 2.0 * std::numbers::pi));
        if (gap > best) {
            best = gap;
            beta = cand;
        }
    }
    const Complex ray = std::polar(1.0, sgn * beta);
    const Complex decay = Complex(0.0, sgn) * ray;  // Re < 0

    // rho = ray * u / |c|
    Complex sum = 0.0;
    for (const DeNode& nd : exp_sinh(h)) {
        const double u = nd.x;
        const Complex e = std::exp(decay * u);
        if (std::abs(e) < 1e-300) continue;
        sum += nd.w * e / (a * ray * u + 2.0 * ac);
    }
    Complex result = ray * sum;

    const bool inside = sgn > 0 ? (pole_angle > 0.0 && pole_angle < sgn * beta)
                                : (pole_angle < 0.0 && pole_angle > sgn * beta);
    if (inside) {
        const Complex residue = std::exp(Complex(0.0, c) * pole) / a;
        result += Complex(0.0, 2.0 * std::numbers::pi * sgn) * residue;
    }
    return result;
}

inline Complex gk_integral(Complex z, double h) {
    const double alpha = std::arg(z);
    const double r = std::abs(z);
    const double two_pi = 2.0 * std::numbers::pi;
    // Integrand in phi: jump at phi = pi (pole crosses the real axis), log
    // singularities where xi.z = 0.
    std::vector<double> cuts{0.0, std::numbers::pi, two_pi};
    for (double s : {alpha + 0.5 * std::numbers::pi, alpha + 1.5 * std::numbers::pi}) {
        double v = std::fmod(s, two_pi);
        if (v < 0) v += two_pi;
        cuts.push_back(v);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> uniq;
    for (double cpt : cuts)
        if (uniq.empty() || cpt - uniq.back() > 1e-12) uniq.push_back(cpt);

    Complex total = 0.0;
    for (std::size_t s = 0; s + 1 < uniq.size(); ++s) {
        for (const DeNode& nd : tanh_sinh(uniq[s], uniq[s + 1], h)) {
            const double phi = nd.x;
            double c = r * std::cos(phi - alpha);
            if (c == 0.0) c = 1e-300;
            total += nd.w * std::polar(1.0, -phi) * radial_integral(phi, c, h);
        }
    }
    return total / (4.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace detail

/// g_1(z) from its defining Fourier integral in polar coordinates, valid for
/// 0.2 <= |z| <= 3. `points` sets the coarse double-exponential step
/// h = 6.4/points; the value is taken at h/2 and the error estimated from
/// the difference of the two levels.
inline OracleResult gk_integral_oracle(Complex z, int points = 128) {
    const double az = std::abs(z);
    if (!(az >= 0.2 && az <= 3.0)) throw DomainError("gk_integral_oracle: requires 0.2 <= |z| <= 3");
    if (points < 8) throw ParameterError("gk_integral_oracle: at least 8 points");
    const double h = 6.4 / points;
    const Complex coarse = detail::gk_integral(z, h);
    const Complex fine = detail::gk_integral(z, 0.5 * h);
    return {fine, std::abs(fine - coarse) + 1e-15 * std::abs(fine), "polar-contour-double-exponential"};
}

// ---------------------------------------------------------------------------
// Radial quadrature and finite-difference Laplacian

/// int_0^1 f(r) r dr by composite 20-point Gauss-Legendre, `panels` panels
/// per piece between breakpoints, with the error estimated by doubling the
/// panel count. Breakpoints should mark kinks of f.
inline OracleResult quadrature(const std::function<double(double)>& f, int panels = 32,
                               std::vector<double> breakpoints = {}) {
    if (panels < 1) throw ParameterError("quadrature: at least one panel");
    std::erase_if(breakpoints, [](double b) { return !(b > 0.0 && b < 1.0); });
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.insert(breakpoints.begin(), 0.0);
    breakpoints.push_back(1.0);
    auto composite = [&](int p) {
        double sum = 0.0;
        for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
            const double a0 = breakpoints[s];
            const double h = (breakpoints[s + 1] - a0) / p;
            for (int i = 0; i < p; ++i) {
                const double a = a0 + i * h;
                sum += boost::math::quadrature::gauss<double, 20>::integrate([&f](double r) { return f(r) * r; }, a,
                                                                             a + h);
            }
        }
        return sum;
    };
    const double coarse = composite(panels);
    const double fine = composite(2 * panels);
    return {fine, std::abs(fine - coarse), "gauss-legendre-20-doubling"};
}

/// Five-point Laplacian (f(z+h) + f(z-h) + f(z+ih) + f(z-ih) - 4 f(z)) / h^2.
inline double fd_laplacian(const std::function<double(Complex)>& field, Complex z, double h) {
    if (!(h > 0.0)) throw ParameterError("fd_laplacian: h must be positive");
    const Complex dx(h, 0.0), dy(0.0, h);
    return (field(z + dx) + field(z - dx) + field(z + dy) + field(z - dy) - 4.0 * field(z)) / (h * h);
}

}  // namespace excircle::oracle
