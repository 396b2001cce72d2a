#pragma once

// Radial profiles on the unit disc: the C^2 test bump w, conductivity-type
// potentials q0 = sigma^{-1/2} Delta sigma^{1/2}, and the family q0 + lambda w.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "excircle/errors.hpp"

namespace excircle {

enum class Smoothness { C2, CInfSampled };

/// A radial function r -> f(r) that vanishes for r >= support_radius.
///
/// The stored evaluator is wrapped so the vanishing invariant holds no matter
/// what the callable does past the support. Breakpoints mark radii where the
/// profile is less smooth (piece boundaries); solvers may split there.
class RadialProfile {
public:
    using Evaluator = std::function<double(double)>;

    RadialProfile(Evaluator f, double support_radius, Smoothness smoothness = Smoothness::C2,
                  std::vector<double> breakpoints = {})
        : f_(std::move(f)), support_(support_radius), smoothness_(smoothness),
          breakpoints_(std::move(breakpoints)) {
        if (!f_) throw ParameterError("RadialProfile: empty evaluator");
        if (!(support_ > 0.0 && support_ <= 1.0))
            throw ParameterError("RadialProfile: support radius must lie in (0, 1]");
        std::erase_if(breakpoints_, [this](double b) { return !(b > 0.0 && b < support_); });
        std::sort(breakpoints_.begin(), breakpoints_.end());
        breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    }

    double operator()(double r) const { return r >= support_ ? 0.0 : f_(r); }

    double support_radius() const noexcept { return support_; }
    Smoothness smoothness() const noexcept { return smoothness_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

    static RadialProfile zero() {
        return RadialProfile([](double) { return 0.0; }, 1.0, Smoothness::CInfSampled);
    }

    /// c on [0, support), 0 beyond.
    static RadialProfile constant(double c, double support_radius = 1.0) {
        return RadialProfile([c](double) { return c; }, support_radius, Smoothness::CInfSampled);
    }

private:
    Evaluator f_;
    double support_;
    Smoothness smoothness_;
    std::vector<double> breakpoints_;
};

/// Quintic smoothstep 1 - 10t^3 + 15t^4 - 6t^5 and its first two derivatives.
struct Smoothstep {
    static constexpr double value(double t) { return 1.0 - t * t * t * (10.0 - t * (15.0 - 6.0 * t)); }
    static constexpr double d1(double t) { return -30.0 * t * t * (1.0 - t) * (1.0 - t); }
    static constexpr double d2(double t) { return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }
};

/// The radial C^2 test function: 1 on [0,R1], smoothstep on (R1,R2), 0 beyond R2.
class TestBump {
public:
    TestBump(double r1, double r2) : r1_(r1), r2_(r2) {
        if (!(r1 > 0.0 && r1 < r2 && r2 < 1.0))
            throw ParameterError("test bump radii must satisfy 0 < R1 < R2 < 1");
    }

    double r1() const noexcept { return r1_; }
    double r2() const noexcept { return r2_; }

    double value(double r) const {
        if (r <= r1_) return 1.0;
        if (r >= r2_) return 0.0;
        return Smoothstep::value((r - r1_) / (r2_ - r1_));
    }
    double d1(double r) const {
        if (r <= r1_ || r >= r2_) return 0.0;
        const double width = r2_ - r1_;
        return Smoothstep::d1((r - r1_) / width) / width;
    }
    double d2(double r) const {
        if (r <= r1_ || r >= r2_) return 0.0;
        const double width = r2_ - r1_;
        return Smoothstep::d2((r - r1_) / width) / (width * width);
    }

    RadialProfile profile() const {
        return RadialProfile([b = *this](double r) { return b.value(r); }, r2_, Smoothness::C2, {r1_, r2_});
    }

private:
    double r1_, r2_;
};

inline double test_bump(double r, double r1, double r2) {
    if (r < 0.0) throw ParameterError("test_bump: r must be nonnegative");
    return TestBump(r1, r2).value(r);
}

/// A radial conductivity sigma with sigma == 1 for r >= transition_radius.
/// Derivatives are optional; when absent they are taken by centered differences.
struct Conductivity {
    std::function<double(double)> value;
    std::optional<std::function<double(double)>> d1;
    std::optional<std::function<double(double)>> d2;
    double transition_radius = 1.0;
    std::vector<double> breakpoints;
};

/// sigma(r) = 1 + amplitude * w(r; R1, R2), analytic derivatives.
inline Conductivity bump_conductivity(double amplitude, double r1, double r2) {
    const TestBump b(r1, r2);
    Conductivity s;
    s.value = [b, amplitude](double r) { return 1.0 + amplitude * b.value(r); };
    s.d1 = [b, amplitude](double r) { return amplitude * b.d1(r); };
    s.d2 = [b, amplitude](double r) { return amplitude * b.d2(r); };
    s.transition_radius = r2;
    s.breakpoints = {r1, r2};
    return s;
}

struct SigmaParams {
    double amplitude = 1.5;
    double r1 = 0.3;
    double r2 = 0.7;
};

inline Conductivity default_example2_conductivity(const SigmaParams& p = {}) {
    return bump_conductivity(p.amplitude, p.r1, p.r2);
}

/// q0 = f''/f + f'/(r f) with f = sigma^{1/2}; at r = 0 the limit 2 f''(0)/f(0).
inline RadialProfile conductivity_to_potential(const Conductivity& sigma, int check_points = 1001) {
    if (!sigma.value) throw ParameterError("conductivity_to_potential: empty sigma");
    const double support = sigma.transition_radius;
    for (int i = 0; i < check_points; ++i) {
        const double r = static_cast<double>(i) / (check_points - 1);
        const double s = sigma.value(r);
        if (!(s > 0.0) || !std::isfinite(s))
            throw DomainError("conductivity_to_potential: sigma not positive at r = " + std::to_string(r));
    }

    constexpr double fd_step = 1e-4;
    auto first = [sigma](double r) {
        if (sigma.d1) return (*sigma.d1)(r);
        const double h = fd_step;
        if (r < h) return (sigma.value(r + h) - sigma.value(std::abs(r - h))) / (2.0 * h);
        return (sigma.value(r + h) - sigma.value(r - h)) / (2.0 * h);
    };
    auto second = [sigma](double r) {
        if (sigma.d2) return (*sigma.d2)(r);
        const double h = fd_step;
        // Radial functions are even in r, so sigma(-h) = sigma(h).
        return (sigma.value(r + h) - 2.0 * sigma.value(r) + sigma.value(std::abs(r - h))) / (h * h);
    };

    auto q0 = [sigma, first, second](double r) {
        const double s = sigma.value(r);
        const double s1 = first(r);
        const double s2 = second(r);
        const double f = std::sqrt(s);
        const double f1 = s1 / (2.0 * f);
        const double f2 = s2 / (2.0 * f) - s1 * s1 / (4.0 * s * f);
        if (r < 1e-8) return 2.0 * f2 / f;
        return f2 / f + f1 / (r * f);
    };
    return RadialProfile(q0, support, Smoothness::C2, sigma.breakpoints);
}

struct PotentialFamilyMember {
    RadialProfile base;
    RadialProfile bump;
    double lambda;
    RadialProfile combined;
};

/// q_lambda = base + lambda * bump. The bump must be nonnegative (to 1e-12)
/// and not identically zero on the sample grid.
inline PotentialFamilyMember family_member(const RadialProfile& base, const RadialProfile& bump, double lambda,
                                           int check_points = 1001) {
    bool nonzero = false;
    for (int i = 0; i < check_points; ++i) {
        const double r = static_cast<double>(i) / (check_points - 1);
        const double v = bump(r);
        if (v < -1e-12) throw DomainError("family_member: bump negative at r = " + std::to_string(r));
        if (v > 0.0) nonzero = true;
    }
    if (!nonzero) throw DomainError("family_member: bump is identically zero");

    std::vector<double> breaks = base.breakpoints();
    breaks.insert(breaks.end(), bump.breakpoints().begin(), bump.breakpoints().end());
    if (base.support_radius() < 1.0) breaks.push_back(base.support_radius());
    if (bump.support_radius() < 1.0) breaks.push_back(bump.support_radius());
    const double support = std::max(base.support_radius(), bump.support_radius());
    const Smoothness sm = (base.smoothness() == Smoothness::C2 || bump.smoothness() == Smoothness::C2)
                              ? Smoothness::C2
                              : Smoothness::CInfSampled;
    RadialProfile combined([base, bump, lambda](double r) { return base(r) + lambda * bump(r); }, support, sm,
                           std::move(breaks));
    return {base, bump, lambda, std::move(combined)};
}

/// Checks that the profile is finite on [0,1] and zero beyond its support.
inline bool profile_is_valid(const RadialProfile& p, int points = 1001) {
    for (int i = 0; i < points; ++i) {
        const double r = static_cast<double>(i) / (points - 1);
        const double v = p(r);
        if (!std::isfinite(v)) return false;
        if (r >= p.support_radius() && v != 0.0) return false;
    }
    return true;
}

/// Two-column CSV (r,value) on a uniform grid over [0,1].
inline void write_profile_csv(std::ostream& os, const RadialProfile& p, int points = 201) {
    os << "r,value\n";
    char buf[64];
    for (int i = 0; i < points; ++i) {
        const double r = static_cast<double>(i) / (points - 1);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r, p(r));
        os << buf;
    }
}

}  // namespace excircle
