#pragma once

// Dirichlet-to-Neumann eigenvalues of a radial potential on the unit disc.
//
// For angular mode n the Dirichlet solution is psi_n(r) e^{in theta} with
//   -(1/r)(r psi_n')' + (n^2/r^2 + q) psi_n = 0,  psi_n(1) = 1,
// and mu_n = psi_n'(1). We integrate the regular solution in the factored
// form psi = r^n u, i.e. u'' + (2n+1)/r u' = q u with u(0) = 1, u'(0) = 0,
// which keeps mu_n - n = u'(1)/u(1) free of cancellation for large n.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "excircle/errors.hpp"
#include "excircle/potentials.hpp"
#include "excircle/quadrature.hpp"

namespace excircle {

struct RadialSolverOptions {
    double start_radius = 1e-4;
    double tolerance = 1e-12;
    /// |psi_n(1)| before rescaling below this flags a Dirichlet eigenvalue.
    double pole_threshold = 1e-8;
};

struct RadialModeSolution {
    int n = 0;
    std::vector<double> radii;
    std::vector<double> values;  ///< psi_n at radii, normalized psi_n(1) = 1
    double derivative_at_1 = 0.0;
    double unscaled_boundary_value = 0.0;  ///< u(1) for psi ~ r^n at the origin
    int regularity_exponent = 0;
};

namespace detail {

using OdeState = std::array<double, 2>;

struct ModeEquation {
    const RadialProfile* q;
    int n;

    void operator()(const OdeState& y, OdeState& dy, double r) const {
        // Left limit at the boundary: profiles vanish at r >= support, and the
        // support may be exactly 1.
        constexpr double inside = 1.0 - std::numeric_limits<double>::epsilon();
        const double qr = (*q)(std::min(r, inside));
        dy[0] = y[1];
        dy[1] = -(2.0 * n + 1.0) / r * y[1] + qr * y[0];
    }
};

struct ModeTrace {
    std::vector<double> u;   // at requested radii
    double u1 = 0.0, du1 = 0.0;
};

// Integrates u on [r0, 1], stopping at every breakpoint and requested radius.
inline ModeTrace integrate_mode(const RadialProfile& q, int n, std::span<const double> radii,
                                const RadialSolverOptions& opt) {
    namespace ode = boost::numeric::odeint;
    const double r0 = opt.start_radius;
    const double q0 = q(0.0);
    // Two-term Frobenius start: u = 1 + q(0) r^2 / (4(n+1)).
    OdeState y{1.0 + q0 * r0 * r0 / (4.0 * (n + 1)), q0 * r0 / (2.0 * (n + 1))};

    std::vector<double> stops{r0};
    for (double b : q.breakpoints())
        if (b > r0 && b < 1.0) stops.push_back(b);
    for (double r : radii)
        if (r > r0 && r < 1.0) stops.push_back(r);
    stops.push_back(1.0);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    std::vector<OdeState> at_stop;
    at_stop.reserve(stops.size());
    auto stepper = ode::make_controlled(opt.tolerance, opt.tolerance, ode::runge_kutta_dopri5<OdeState>());
    ModeEquation eq{&q, n};
    ode::integrate_times(stepper, eq, y, stops.begin(), stops.end(), 1e-3,
                         [&at_stop](const OdeState& s, double) { at_stop.push_back(s); });

    ModeTrace trace;
    trace.u1 = at_stop.back()[0];
    trace.du1 = at_stop.back()[1];
    trace.u.reserve(radii.size());
    for (double r : radii) {
        if (r <= r0) {
            trace.u.push_back(1.0 + q0 * r * r / (4.0 * (n + 1)));
            continue;
        }
        const auto it = std::lower_bound(stops.begin(), stops.end(), r);
        trace.u.push_back(at_stop[static_cast<std::size_t>(it - stops.begin())][0]);
    }
    return trace;
}

inline std::vector<double> uniform_radii(int points) {
    std::vector<double> r(points);
    for (int i = 0; i < points; ++i) r[i] = static_cast<double>(i) / (points - 1);
    return r;
}

}  // namespace detail

/// Regular solution of the radial mode equation, normalized to psi_n(1) = 1.
/// Throws PoleError when zero is (numerically) a Dirichlet eigenvalue.
inline RadialModeSolution solve_radial_mode(const RadialProfile& q, int n, std::span<const double> radii,
                                            const RadialSolverOptions& opt = {}) {
    if (n < 0) throw ParameterError("solve_radial_mode: angular mode must be nonnegative");
    const detail::ModeTrace tr = detail::integrate_mode(q, n, radii, opt);
    if (!(std::abs(tr.u1) >= opt.pole_threshold)) throw PoleError(n, tr.u1);

    RadialModeSolution sol;
    sol.n = n;
    sol.regularity_exponent = n;
    sol.radii.assign(radii.begin(), radii.end());
    sol.values.resize(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        sol.values[i] = (r == 1.0) ? 1.0 : std::pow(r, n) * tr.u[i] / tr.u1;
    }
    sol.derivative_at_1 = n + tr.du1 / tr.u1;
    sol.unscaled_boundary_value = tr.u1;
    return sol;
}

inline RadialModeSolution solve_radial_mode(const RadialProfile& q, int n, const RadialSolverOptions& opt = {}) {
    const std::vector<double> grid = detail::uniform_radii(101);
    return solve_radial_mode(q, n, grid, opt);
}

/// mu_n(q) = psi_n'(1); symmetric in n.
inline double dn_eigenvalue(const RadialProfile& q, int n, const RadialSolverOptions& opt = {}) {
    const int m = n < 0 ? -n : n;
    const detail::ModeTrace tr = detail::integrate_mode(q, m, {}, opt);
    if (!(std::abs(tr.u1) >= opt.pole_threshold)) throw PoleError(m, tr.u1);
    return m + tr.du1 / tr.u1;
}

/// DN eigenvalues mu_0..mu_N and ND eigenvalues nu_n = 1/mu_n.
/// nu_0 is NaN (the ND map acts on mean-zero data), as is any mode with a pole
/// or mu_n == 0.
struct DNSpectrum {
    int N = 0;
    std::vector<double> mu;
    std::vector<double> nu;
    std::vector<bool> pole_modes;
    bool pole_flag = false;
    double lambda = std::numeric_limits<double>::quiet_NaN();

    double mu_at(int n) const { return mu.at(static_cast<std::size_t>(n < 0 ? -n : n)); }
    double nu_at(int n) const { return nu.at(static_cast<std::size_t>(n < 0 ? -n : n)); }
};

inline DNSpectrum dn_spectrum(const RadialProfile& q, int N,
                              double lambda = std::numeric_limits<double>::quiet_NaN(),
                              const RadialSolverOptions& opt = {}) {
    if (N < 1) throw ParameterError("dn_spectrum: N must be at least 1");
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    DNSpectrum s;
    s.N = N;
    s.lambda = lambda;
    s.mu.assign(N + 1, nan);
    s.nu.assign(N + 1, nan);
    s.pole_modes.assign(N + 1, false);
    for (int n = 0; n <= N; ++n) {
        try {
            s.mu[n] = dn_eigenvalue(q, n, opt);
            if (n > 0 && s.mu[n] != 0.0) s.nu[n] = 1.0 / s.mu[n];
        } catch (const PoleError&) {
            s.pole_modes[n] = true;
            s.pole_flag = true;
        }
    }
    return s;
}

/// Derivative at lambda = 0 of the boundary pairing <1, Lambda_{q_lambda} 1>
/// = 2 pi mu_0(q_lambda): the area integral of bump * psi_0^2, with psi_0 the
/// n = 0 Dirichlet solution of the (conductivity-type) base potential.
inline double mu_prime_at_zero(const RadialProfile& base, const RadialProfile& bump,
                               const RadialSolverOptions& opt = {}) {
    const double mu0 = dn_eigenvalue(base, 0, opt);
    if (std::abs(mu0) > 1e-6)
        throw PreconditionError("mu_prime_at_zero: base potential is not of conductivity type (mu_0 = "
                                + std::to_string(mu0) + ")");
    std::vector<double> breaks{0.0};
    for (double b : bump.breakpoints()) breaks.push_back(b);
    for (double b : base.breakpoints())
        if (b < bump.support_radius()) breaks.push_back(b);
    breaks.push_back(bump.support_radius());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const auto [nodes, weights] = quad::composite_nodes(breaks, 4, 20);
    const RadialModeSolution psi0 = solve_radial_mode(base, 0, nodes, opt);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        sum += weights[i] * bump(nodes[i]) * psi0.values[i] * psi0.values[i] * nodes[i];
    return 2.0 * std::numbers::pi * sum;
}

}  // namespace excircle
