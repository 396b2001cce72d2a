// Acceptance checks, one criterion per invocation:
//   acceptance <id>     run criterion id (1..10)
//   acceptance          run all
// Each prints a single PASS/FAIL line with the measured quantity, the
// tolerance and the wall time against its budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "excircle.hpp"

namespace {

using namespace excircle;
namespace fs = std::filesystem;

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RadialProfile example1(double lambda) {
    return family_member(RadialProfile::zero(), TestBump(0.8, 0.9).profile(), lambda).combined;
}

SweepConfig desk_config() {
    SweepConfig c;  // defaults are the Example 1 desk grid
    c.workers = 4;
    c.cache = true;
    return c;
}

Outcome c1() {
    const DNSpectrum s = dn_spectrum(RadialProfile::zero(), 12);
    double e = 0.0;
    for (int n = 0; n <= 12; ++n) e = std::max(e, std::abs(s.mu[n] - n));
    return {e <= 1e-8, fmt("max |mu_n - n| = %.2e (tol 1e-08)", e)};
}

Outcome c2() {
    double e = 0.0;
    for (double c : {0.25, 1.0, 4.0}) {
        const DNSpectrum s = dn_spectrum(RadialProfile::constant(c), 4);
        for (int n = 0; n <= 4; ++n) {
            const double ref = oracle::bessel_dn_oracle(c, n).real();
            e = std::max(e, std::abs(s.mu[n] - ref) / std::abs(ref));
        }
    }
    return {e <= 1e-6, fmt("max rel err vs Bessel = %.2e (tol 1e-06)", e)};
}

Outcome c3() {
    const Conductivity sigma = default_example2_conductivity();
    const RadialProfile q0 = conductivity_to_potential(sigma);
    const RadialProfile w = TestBump(0.8, 0.9).profile();
    const double mu0 = dn_eigenvalue(q0, 0);
    const double h = 1e-4;
    const double slope = (dn_eigenvalue(family_member(q0, w, h).combined, 0) -
                          dn_eigenvalue(family_member(q0, w, -h).combined, 0)) /
                         (2.0 * h);
    const double target =
        two_pi * oracle::quadrature([&](double r) { return w(r) * sigma.value(r); }, 32, {0.3, 0.7, 0.8, 0.9}).real();
    // the pairing <1, Lambda 1> = 2 pi mu_0 is what the integral differentiates
    const double rel = std::abs(two_pi * slope - target) / target;
    return {std::abs(mu0) <= 1e-8 && rel <= 1e-4,
            fmt("|mu_0| = %.2e (tol 1e-08); d(2pi mu_0)/dlambda = %.8f vs 2pi int w sigma r dr = %.8f, rel %.2e "
                "(tol 1e-04)",
                std::abs(mu0), two_pi * slope, target, rel)};
}

Outcome c4() {
    const double anchor = std::abs(HkEvaluator(Complex(1.0, 0.0)).h1_part(Complex(1e-10, 0.0)).value +
                                   euler_gamma / two_pi);
    double lap_ratio = 0.0;
    for (double ak : {0.01, 1.0, 3.5}) {
        const HkEvaluator hk(Complex(ak, 0.0));
        auto field = [&](Complex z) { return hk(z).value; };
        double worst = 0.0;
        for (int i = 0; i < 21; ++i)
            for (int j = 0; j < 21; ++j) {
                const Complex z(-1.0 + 0.1 * i, -1.0 + 0.1 * j);
                if (std::abs(z) <= 1.0) worst = std::max(worst, std::abs(oracle::fd_laplacian(field, z, 1e-3)));
            }
        lap_ratio = std::max(lap_ratio, worst / (1e-4 * (1.0 + ak * ak)));
    }
    const Complex pts[] = {{0.5, 0.3}, {-1.2, 0.7}, {0.0, -2.0}, {2.5, 0.1},
                           {0.2, 0.0}, {-0.4, -1.1}, {1.0, 1.0}, {-2.0, 2.0}};
    double g_ratio = 0.0;
    for (Complex z : pts) {
        const oracle::OracleResult o = oracle::gk_integral_oracle(z);
        g_ratio = std::max(g_ratio, std::abs(g1(z) - o.value) / (3.0 * o.estimated_error));
    }
    return {anchor <= 1e-8 && lap_ratio <= 1.0 && g_ratio <= 1.0,
            fmt("|H1(0)+gamma/2pi| = %.2e (tol 1e-08); max FD Laplacian / (1e-4(1+|k|^2)) = %.3f (<= 1); "
                "max |g1 - oracle| / (3 est) = %.3f (<= 1)",
                anchor, lap_ratio, g_ratio)};
}

Outcome c5() {
    double e = 0.0;
    for (double lam : {-0.5, 0.5}) {
        const DNSpectrum s = dn_spectrum(example1(lam), 12, lam);
        const BoundarySystem sys = assemble_system(Complex(0.01, 0.0), s);
        e = std::max(e, std::abs(zero_mode_component(sys) - zero_mode_diagnostic(s.mu[0], 0.01)));
    }
    return {e <= 1e-5, fmt("max |(I+T)1 zero mode - (1 + mu(2 pi h - log k))| = %.2e (tol 1e-05)", e)};
}

Outcome c6() {
    double worst = 0.0, refined = 0.0;
    double t001 = 0.0;
    for (double lam : {-0.5, 0.5}) {
        const DNSpectrum s = dn_spectrum(example1(lam), 12, lam);
        for (double k : {0.01, 0.02, 0.05}) {
            const Complex t = sample_scattering(Complex(k, 0.0), s).t;
            worst = std::max(worst, std::abs(t - small_k_law(k)) / k);
            refined = std::max(refined, std::abs(t - zero_mode_law(s.mu[0], k)) / k);
            if (lam == 0.5 && k == 0.01) t001 = t.real();
        }
    }
    const bool pin = std::abs(t001 - small_k_law(0.01)) <= 0.01;
    return {worst <= 1.0 && pin,
            fmt("max |t + 2pi/log k| / k = %.3g (tol 1.0); t(0.01) = %.5f vs 1.36438 (tol 0.01); "
                "[info] max |t - 2pi mu/(1 + mu(2pi h - log k))| / k = %.3g",
                worst, t001, refined)};
}

const SweepResult& desk_sweep() {
    static const SweepResult r = run_sweep(desk_config());
    return r;
}

Outcome c7() {
    const SweepResult& r = desk_sweep();
    bool ok = true;
    std::string d;
    for (std::size_t li = 0; li < r.lambdas.size(); ++li) {
        const double lam = r.lambdas[li];
        const ExceptionalReport& rep = r.reports[li];
        const bool negative = lam == -2.0 || lam == -1.5 || lam == -1.0 || lam == -0.5;
        const bool positive = lam == 0.5 || lam == 1.0 || lam == 2.0;
        if (negative) {
            const bool one = rep.detected_radii.size() == 1 && rep.asymptotic_radius;
            const double rel =
                one ? std::abs(rep.detected_radii[0].radius - *rep.asymptotic_radius) / *rep.asymptotic_radius : NAN;
            ok = ok && one && rel <= 0.10;
            d += fmt("l=%.1f: %zu radius %.5f vs %.5f rel %.3f; ", lam, rep.detected_radii.size(),
                     one ? rep.detected_radii[0].radius : NAN, rep.asymptotic_radius.value_or(NAN), rel);
        } else if (positive) {
            std::size_t in_window = 0;
            for (const auto& x : rep.detected_radii)
                if (x.radius >= 0.01 && x.radius <= 3.5) ++in_window;
            ok = ok && in_window == 0;
            d += fmt("l=%.1f: %zu radii; ", lam, in_window);
        }
    }
    return {ok, d + "(tol 0.10)"};
}

Outcome c8() {
    const DNSpectrum s = dn_spectrum(example1(-1.0), 12, -1.0);
    double spread = 0.0, imag = 0.0;
    for (double ak : {0.1, 1.0}) {
        const Complex ref = sample_scattering(Complex(ak, 0.0), s).t;
        for (double arg : {0.0, std::numbers::pi / 4, std::numbers::pi / 2}) {
            const Complex t = sample_scattering(std::polar(ak, arg), s).t;
            spread = std::max(spread, std::abs(t - ref) / std::abs(ref));
            imag = std::max(imag, std::abs(t.imag()) / (1.0 + std::abs(t)));
        }
    }
    return {spread <= 1e-6 && imag <= 1e-6,
            fmt("max rel spread over arg k = %.2e (tol 1e-06); max |Im t|/(1+|t|) = %.2e (tol 1e-06)", spread,
                imag)};
}

Outcome c9() {
    const SweepResult& r = desk_sweep();
    const fs::path out = "acceptance_out";
    emit_outputs(r, out);
    std::vector<double> radii;
    std::string d;
    for (std::size_t li = 0; li < r.lambdas.size(); ++li) {
        const double lam = r.lambdas[li];
        if (lam < -2.0 - 1e-12 || lam > -0.5 + 1e-12) continue;
        const auto& det = r.reports[li].detected_radii;
        radii.push_back(det.size() == 1 ? det[0].radius : NAN);
        d += fmt("%.2f:%.5f ", lam, radii.back());
    }
    bool ok = radii.size() == 7;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        ok = ok && std::isfinite(radii[i]);
        if (i > 0) ok = ok && radii[i] < radii[i - 1];
    }
    return {ok, "radii decrease as lambda -> 0-: " + d + "(map in " + (out / "map.pgm").string() + ")"};
}

Outcome c10() {
    const fs::path cache_dir = fs::temp_directory_path() / "excircle_acceptance_c10";
    fs::remove_all(cache_dir);
    SweepConfig cold = desk_config();
    cold.cache_dir = cache_dir.string();
    cold.workers = 1;
    SweepConfig warm = cold;
    warm.workers = 6;
    const SweepResult a = run_sweep(cold);
    const SweepResult b = run_sweep(warm);
    const std::string sa = samples_csv(a), sb = samples_csv(b);
    fs::remove_all(cache_dir);
    const bool coherent = b.cache_checked == 3 && b.cache_max_deviation == 0.0;
    return {sa == sb && a.cache_hits == 0 && b.cache_hits == static_cast<int>(b.k_values.size()) && coherent,
            fmt("samples.csv %s (%zu bytes, fnv1a %016llx vs %016llx); cold hits %d, warm hits %d/%zu; "
                "cache spot checks %d, max deviation %.1e",
                sa == sb ? "identical" : "DIFFER", sa.size(), static_cast<unsigned long long>(fnv1a64(sa)),
                static_cast<unsigned long long>(fnv1a64(sb)), a.cache_hits, b.cache_hits, b.k_values.size(),
                b.cache_checked, b.cache_max_deviation)};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "free-space DN spectrum", 1.0, c1},
        {2, "Bessel oracle equivalence", 1.0, c2},
        {3, "conductivity-type identities", 5.0, c3},
        {4, "kernel anchors", 30.0, c4},
        {5, "zero-mode identity", 5.0, c5},
        {6, "small-k law", 10.0, c6},
        {7, "exceptional circles vs asymptotic radius", 300.0, c7},
        {8, "radiality and reality", 30.0, c8},
        {9, "monotone singular curve", 300.0, c9},
        {10, "determinism and cache coherence", 900.0, c10},
    };
    return list;
}

bool run(const Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    std::printf("[%s] C%-2d %s: %s; time %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    bool all = true;
    if (argc > 1) {
        const int id = std::atoi(argv[1]);
        for (const Criterion& c : criteria())
            if (c.id == id) return run(c) ? 0 : 1;
        std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
        return 2;
    }
    for (const Criterion& c : criteria()) all = run(c) && all;
    return all ? 0 : 1;
}
