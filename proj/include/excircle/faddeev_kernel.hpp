#pragma once

// Exponential integral, Faddeev's fundamental solution at k = 1, and the
// smooth harmonic kernels H_1, H_k = G_k - G_0.
//
// Convention: G_1(z) = e^{iz} g_1(z) = -(1/2pi) Re Ei(iz), so that
// H_1(z) = G_1(z) + (1/2pi) log|z| is real, harmonic and H_1(0) = -gamma/2pi.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "excircle/errors.hpp"

namespace excircle {

using Complex = std::complex<double>;

inline constexpr double euler_gamma = std::numbers::egamma;
/// h = H_1(0) = -gamma / (2 pi)
inline constexpr double h_zero = -std::numbers::egamma / (2.0 * std::numbers::pi);

namespace detail {

inline constexpr double ei_asymptotic_radius = 30.0;
// Where |w| - Re w exceeds this the power series cancels more than e^8.
inline constexpr double ei_series_cancellation = 8.0;

enum class EiBranch { Series, ContinuedFraction, Asymptotic };

inline EiBranch ei_branch(Complex w) {
    const double r = std::abs(w);
    if (r > ei_asymptotic_radius) return EiBranch::Asymptotic;
    if (r <= 2.0 || r - w.real() <= ei_series_cancellation) return EiBranch::Series;
    return EiBranch::ContinuedFraction;
}

// sum_{m>=1} w^m / (m m!)
inline Complex ein_tail(Complex w) {
    Complex term = w;  // w^m / m!
    Complex sum = w;
    for (int m = 2; m < 500; ++m) {
        term *= w / static_cast<double>(m);
        const Complex add = term / static_cast<double>(m);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// E_1(z) by the modified Lentz continued fraction; z away from the negative axis.
inline Complex e1_continued_fraction(Complex z) {
    constexpr double tiny = 1e-300;
    Complex b = z + 1.0;
    Complex c = 1.0 / tiny;
    Complex d = 1.0 / b;
    Complex h = d;
    for (int i = 1; i < 5000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const Complex del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z);
}

inline double principal_sign_pi(Complex w) {
    if (w.imag() > 0.0) return std::numbers::pi;
    if (w.imag() < 0.0) return -std::numbers::pi;
    return w.real() < 0.0 ? std::numbers::pi : 0.0;
}

inline Complex ei_asymptotic(Complex w) {
    Complex term = 1.0;
    Complex sum = 1.0;
    double last = 1.0;
    for (int m = 1; m < 200; ++m) {
        term *= static_cast<double>(m) / w;
        const double mag = std::abs(term);
        if (mag > last) break;  // divergent tail
        sum += term;
        last = mag;
        if (mag < 1e-17) break;
    }
    return std::exp(w) / w * sum + Complex(0.0, principal_sign_pi(w));
}

}  // namespace detail

/// Ei on the principal branch (cut along the negative real axis).
/// Power series near the origin and wherever it is free of cancellation,
/// a continued fraction for -E1(-w) elsewhere inside |w| <= 30, and the
/// asymptotic series beyond. Re Ei is branch independent and accurate to
/// ~1e-14 relative; the imaginary part is exact up to the Stokes ambiguity
/// on the positive real axis for |w| > 30.
inline Complex exp_integral(Complex w) {
    if (w == Complex(0.0, 0.0)) throw SingularityError("exp_integral: Ei is singular at 0");
    switch (detail::ei_branch(w)) {
        case detail::EiBranch::Series:
            return euler_gamma + std::log(w) + detail::ein_tail(w);
        case detail::EiBranch::ContinuedFraction:
            return -detail::e1_continued_fraction(-w) + Complex(0.0, detail::principal_sign_pi(w));
        case detail::EiBranch::Asymptotic:
            break;
    }
    return detail::ei_asymptotic(w);
}

/// Faddeev's g_1 (the k = 1 member of the family).
inline Complex g1(Complex z) {
    if (z == Complex(0.0, 0.0)) throw SingularityError("g1: singular at z = 0");
    const Complex iz(-z.imag(), z.real());
    return -std::exp(-iz) * exp_integral(iz).real() / (2.0 * std::numbers::pi);
}

/// G_0(z) = -(1/2pi) log|z|.
inline double g0(Complex z) { return -std::log(std::abs(z)) / (2.0 * std::numbers::pi); }

/// H_1(w), evaluated without forming the cancelling logarithms when the
/// power series applies: H_1(w) = -(gamma + Re Ein-tail(iw)) / 2pi.
inline double h1(Complex w) {
    if (w == Complex(0.0, 0.0)) return h_zero;
    const Complex iw(-w.imag(), w.real());
    if (detail::ei_branch(iw) == detail::EiBranch::Series)
        return -(euler_gamma + detail::ein_tail(iw).real()) / (2.0 * std::numbers::pi);
    return -(exp_integral(iw).real() - std::log(std::abs(w))) / (2.0 * std::numbers::pi);
}

struct KernelEvaluation {
    double value = 0.0;
    bool stabilized = false;
};

/// H_k(z) = H_1(kz) - log|k| / 2pi for one fixed k.
///
/// Near the origin (|kz| < 0.05) the value is recovered from samples on the
/// circle |z| = R, R = min(0.1/|k|, 2), through the Poisson integral; the
/// samples are taken once at construction, so an evaluator is immutable and
/// safe to share between threads.
class HkEvaluator {
public:
    static constexpr int circle_samples = 64;
    static constexpr double trigger = 0.05;

    explicit HkEvaluator(Complex k) : k_(k) {
        if (k == Complex(0.0, 0.0)) throw ParameterError("h_kernel: k must be nonzero");
        const double ak = std::abs(k);
        log_k_term_ = std::log(ak) / (2.0 * std::numbers::pi);
        radius_ = std::min(0.1 / ak, 2.0);
        for (int j = 0; j < circle_samples; ++j) {
            const double th = 2.0 * std::numbers::pi * j / circle_samples;
            circle_points_[j] = std::polar(radius_, th);
            circle_values_[j] = h1(k_ * circle_points_[j]);
        }
    }

    Complex k() const noexcept { return k_; }
    double poisson_radius() const noexcept { return radius_; }

    /// H_1(k z) with stabilization.
    KernelEvaluation h1_part(Complex z) const {
        if (z == Complex(0.0, 0.0)) return {h_zero, false};
        const double az = std::abs(z);
        if (std::abs(k_) * az < trigger && az <= 0.5 * radius_) return {poisson(z), true};
        return {h1(k_ * z), false};
    }

    KernelEvaluation operator()(Complex z) const {
        KernelEvaluation e = h1_part(z);
        e.value -= log_k_term_;
        return e;
    }

private:
    double poisson(Complex z) const {
        const double r2 = radius_ * radius_;
        const double z2 = std::norm(z);
        double sum = 0.0;
        for (int j = 0; j < circle_samples; ++j)
            sum += circle_values_[j] * (r2 - z2) / std::norm(circle_points_[j] - z);
        return sum / circle_samples;
    }

    Complex k_;
    double log_k_term_ = 0.0;
    double radius_ = 0.0;
    std::array<Complex, circle_samples> circle_points_{};
    std::array<double, circle_samples> circle_values_{};
};

/// H_k(z); |z| <= 2 covers every difference of two boundary points.
inline double h_kernel(Complex k, Complex z) {
    if (std::abs(z) > 2.0 + 1e-12) throw DomainError("h_kernel: |z| must not exceed 2");
    return HkEvaluator(k)(z).value;
}

}  // namespace excircle
