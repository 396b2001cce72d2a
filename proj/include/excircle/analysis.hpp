#pragma once

// Exceptional-circle detection on |k| sweeps, the asymptotic radius law and
// the small-k laws for the scattering transform.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "excircle/bie.hpp"
#include "excircle/errors.hpp"
#include "excircle/faddeev_kernel.hpp"
#include "excircle/potentials.hpp"

namespace excircle {

struct ExceptionalRadius {
    double radius = 0.0;
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    double min_sv = 0.0;
};

struct ExceptionalReport {
    double lambda = 0.0;
    std::vector<ExceptionalRadius> detected_radii;
    std::optional<double> asymptotic_radius;
    double small_k_deviation = 0.0;
    double safe_k_note = 0.0;
};

struct DetectionOptions {
    double blowup_threshold = 50.0;
    double sv_threshold = 1e-3;
    double bisection_tolerance = 1e-4;
    /// samples with |k| at or below this feed small_k_deviation
    double small_k_limit = 0.05;
};

/// exp(2 pi (h + 1/(2 pi mu))) with h = -gamma/2pi.
inline double asymptotic_radius(double mu_lambda) {
    if (mu_lambda == 0.0) throw DomainError("asymptotic_radius: undefined for mu = 0");
    return std::exp(2.0 * std::numbers::pi * (h_zero + 1.0 / (2.0 * std::numbers::pi * mu_lambda)));
}

/// -2 pi / log|k|
inline double small_k_law(double k_modulus) {
    if (!(k_modulus > 0.0 && k_modulus < 1.0)) throw DomainError("small_k_law: requires 0 < |k| < 1");
    return -2.0 * std::numbers::pi / std::log(k_modulus);
}

/// 2 pi mu / (1 + mu (2 pi h - log|k|)): t(k) up to O(|k|) when the inverse
/// stays bounded. Tends to small_k_law only logarithmically.
inline double zero_mode_law(double mu0, double k_modulus) {
    if (!(k_modulus > 0.0)) throw DomainError("zero_mode_law: requires |k| > 0");
    return 2.0 * std::numbers::pi * mu0 / zero_mode_diagnostic(mu0, k_modulus);
}

/// sup_{r <= 1} |2 q(r)| on a uniform grid. A scale for the large-|k| bound
/// (the constant in front is not known), not a guarantee.
inline double safe_k_scale(const RadialProfile& q, int points = 1000) {
    double m = 0.0;
    for (int i = 0; i < points; ++i) {
        const double r = static_cast<double>(i) / (points - 1);
        m = std::max(m, std::abs(2.0 * q(r)));
    }
    return m;
}

/// Re-solves the boundary system at a given |k| on the positive real axis.
using ScatteringResolver = std::function<ScatteringSample(double k_modulus)>;

namespace detail {

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace detail

/// Finds radii where t jumps through infinity: Re t changes sign between
/// neighbours with |t| above the blow-up threshold on one side. Each bracket
/// is bisected on the sign of Re t down to the tolerance; the radius is the
/// zero of the linear interpolant of 1/Re t inside the final bracket, and is
/// kept only if the smallest singular value there is below sv_threshold.
inline std::vector<ExceptionalRadius> detect_exceptional_radii(std::span<const ScatteringSample> samples,
                                                               const ScatteringResolver& resolve,
                                                               const DetectionOptions& opt = {}) {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].k_modulus > samples[i - 1].k_modulus))
            throw ParameterError("detect_exceptional_radii: samples must be sorted by increasing |k|");

    std::vector<ExceptionalRadius> found;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const ScatteringSample& a = samples[i];
        const ScatteringSample& b = samples[i + 1];
        if ((a.flags | b.flags) & (flag_nonfinite | flag_pole)) continue;
        const int sa = detail::sign_of(a.t.real());
        const int sb = detail::sign_of(b.t.real());
        if (sa == 0 || sb == 0 || sa == sb) continue;
        if (std::max(std::abs(a.t), std::abs(b.t)) <= opt.blowup_threshold) continue;

        double lo = a.k_modulus, hi = b.k_modulus;
        double t_lo = a.t.real(), t_hi = b.t.real();
        bool broken = false;
        while (hi - lo > opt.bisection_tolerance) {
            const double mid = 0.5 * (lo + hi);
            const ScatteringSample s = resolve(mid);
            if (s.flags & flag_nonfinite) {
                broken = true;
                break;
            }
            if (detail::sign_of(s.t.real()) == sa) {
                lo = mid;
                t_lo = s.t.real();
            } else {
                hi = mid;
                t_hi = s.t.real();
            }
        }
        if (broken) continue;

        // 1/t is smooth through the pole.
        const double inv_lo = 1.0 / t_lo, inv_hi = 1.0 / t_hi;
        double r = lo + (hi - lo) * inv_lo / (inv_lo - inv_hi);
        if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);
        const ScatteringSample at_root = resolve(r);
        if (!(at_root.min_sv < opt.sv_threshold)) continue;
        found.push_back({r, lo, hi, at_root.min_sv});
    }
    return found;
}

/// Full per-lambda report from an ordered sweep row.
inline ExceptionalReport analyze_row(double lambda, std::span<const ScatteringSample> samples, double mu0,
                                     const RadialProfile& q, const ScatteringResolver& resolve,
                                     const DetectionOptions& opt = {}) {
    ExceptionalReport rep;
    rep.lambda = lambda;
    rep.detected_radii = detect_exceptional_radii(samples, resolve, opt);
    if (std::isfinite(mu0) && mu0 < 0.0) rep.asymptotic_radius = asymptotic_radius(mu0);
    for (const ScatteringSample& s : samples) {
        if (s.flagged() || !(s.k_modulus <= opt.small_k_limit) || s.k_modulus >= 1.0) continue;
        rep.small_k_deviation =
            std::max(rep.small_k_deviation, std::abs(s.t - small_k_law(s.k_modulus)) / s.k_modulus);
    }
    rep.safe_k_note = safe_k_scale(q);
    return rep;
}

inline nlohmann::json to_json(const ExceptionalReport& rep) {
    nlohmann::json radii = nlohmann::json::array();
    for (const auto& d : rep.detected_radii)
        radii.push_back({{"r", d.radius}, {"lo", d.bracket_low}, {"hi", d.bracket_high}, {"min_sv", d.min_sv}});
    nlohmann::json j;
    j["lambda"] = rep.lambda;
    j["radii"] = std::move(radii);
    j["r_asym"] = rep.asymptotic_radius ? nlohmann::json(*rep.asymptotic_radius) : nlohmann::json(nullptr);
    j["small_k_dev"] = rep.small_k_deviation;
    j["safe_k_scale"] = rep.safe_k_note;
    return j;
}

}  // namespace excircle
