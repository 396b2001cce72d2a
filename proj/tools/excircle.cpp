// Command-line front end: sweeps, single rows, spectra, oracle checks, cache
// maintenance and data dumps.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "excircle.hpp"

namespace {

using namespace excircle;

SweepConfig load_config(const std::string& path) {
    if (path.empty()) {
        SweepConfig c;
        c.validate();
        return c;
    }
    return parse_config_file(path);
}

int cmd_sweep(const std::string& path, int workers, const std::string& out, bool no_cache) {
    SweepConfig c = parse_config_file(path);
    if (workers > 0) c.workers = workers;
    if (!out.empty()) c.output_dir = out;
    if (no_cache) c.cache = false;
    c.validate();

    const SweepResult r = run_sweep(c);
    const auto files = emit_outputs(r, c.output_dir);

    for (const auto& [name, secs] : r.timing) std::printf("%-12s %8.2f s\n", name.c_str(), secs);
    if (c.cache)
        std::printf("cache: %d/%zu hits, %d spot checks, max deviation %.3g\n", r.cache_hits, r.k_values.size(),
                    r.cache_checked, r.cache_max_deviation);
    for (const ExceptionalReport& rep : r.reports) {
        std::printf("lambda %+6.2f  radii:", rep.lambda);
        if (rep.detected_radii.empty()) std::printf(" none");
        for (const auto& d : rep.detected_radii) std::printf(" %.5f", d.radius);
        if (rep.asymptotic_radius) std::printf("  (asymptotic %.5f)", *rep.asymptotic_radius);
        std::printf("\n");
    }
    std::printf("wrote %zu files to %s\n", files.size() + 1, c.output_dir.c_str());
    if (r.cache_checked > 0 && r.cache_max_deviation != 0.0) {
        std::fprintf(stderr, "cache coherence check failed\n");
        return 3;
    }
    return 0;
}

int cmd_profile(const std::string& path, double lambda) {
    SweepConfig c = load_config(path);
    const RadialProfile q = sweep_potential(c, lambda);
    const DNSpectrum spec = dn_spectrum(q, c.N, lambda);
    const std::vector<double> ks = expand_grid(c.k_grid);

    std::vector<ScatteringSample> row(ks.size());
    parallel_for(ks.size(), c.workers,
                 [&](std::size_t j) { row[j] = sample_scattering(Complex(ks[j], 0.0), spec, std::nullopt, c.M); });

    std::printf("k,re_t,im_t,zero_mode_diag,min_sv,flag\n");
    for (const ScatteringSample& s : row)
        std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%u\n", s.k_modulus, s.t.real(), s.t.imag(), s.zero_mode_diag,
                    s.min_sv, s.flags);

    DetectionOptions opt;
    opt.blowup_threshold = c.blowup_threshold;
    opt.sv_threshold = c.sv_threshold;
    opt.bisection_tolerance = c.bisection_tol;
    ScatteringResolver resolve = [&](double km) { return sample_scattering(Complex(km, 0.0), spec, std::nullopt, c.M); };
    const ExceptionalReport rep = analyze_row(lambda, row, spec.mu_at(0), q, resolve, opt);
    std::fprintf(stderr, "%s\n", to_json(rep).dump().c_str());
    return 0;
}

int cmd_spectrum(const std::string& path, double lambda, int N) {
    SweepConfig c = load_config(path);
    const DNSpectrum s = dn_spectrum(sweep_potential(c, lambda), N > 0 ? N : c.N, lambda);
    std::printf("lambda,n,mu_n,nu_n,pole_flag\n");
    for (int n = 0; n <= s.N; ++n)
        std::printf("%.17g,%d,%.17g,%.17g,%d\n", lambda, n, s.mu[n], s.nu[n], s.pole_modes[n] ? 1 : 0);
    return 0;
}

int cmd_potential(const std::string& path, double lambda, int points) {
    SweepConfig c = load_config(path);
    write_profile_csv(std::cout, sweep_potential(c, lambda), points);
    return 0;
}

int cmd_cache(const std::string& dir, bool clear) {
    HkCache cache(dir.empty() ? HkCache::default_dir() : std::filesystem::path(dir));
    if (clear) {
        std::printf("removed %zu cached matrices from %s\n", static_cast<std::size_t>(cache.clear()),
                    cache.dir().string().c_str());
        return 0;
    }
    std::size_t count = 0;
    if (std::filesystem::is_directory(cache.dir()))
        for (const auto& e : std::filesystem::directory_iterator(cache.dir()))
            if (e.path().extension() == ".bin") ++count;
    std::printf("%s: %zu cached matrices\n", cache.dir().string().c_str(), count);
    return 0;
}

int cmd_hk_dump(double k, double extent, int points) {
    const HkEvaluator hk(Complex(k, 0.0));
    std::printf("x,y,h_k,stabilized\n");
    for (int i = 0; i < points; ++i) {
        for (int j = 0; j < points; ++j) {
            const double x = -extent + 2.0 * extent * i / (points - 1);
            const double y = -extent + 2.0 * extent * j / (points - 1);
            const KernelEvaluation e = hk(Complex(x, y));
            std::printf("%.17g,%.17g,%.17g,%d\n", x, y, e.value, e.stabilized ? 1 : 0);
        }
    }
    return 0;
}

struct Check {
    std::string name;
    double error;
    double tolerance;
};

int cmd_verify() {
    std::vector<Check> checks;
    const double two_pi = 2.0 * std::numbers::pi;

    {
        const DNSpectrum s = dn_spectrum(RadialProfile::zero(), 12);
        double e = 0.0;
        for (int n = 0; n <= 12; ++n) e = std::max(e, std::abs(s.mu[n] - n));
        checks.push_back({"free DN spectrum mu_n = n", e, 1e-8});
    }
    {
        double e = 0.0;
        for (double c : {0.25, 1.0, 4.0}) {
            const DNSpectrum s = dn_spectrum(RadialProfile::constant(c), 4);
            for (int n = 0; n <= 4; ++n) {
                const double ref = oracle::bessel_dn_oracle(c, n).real();
                e = std::max(e, std::abs(s.mu[n] - ref) / std::abs(ref));
            }
        }
        checks.push_back({"constant potential vs Bessel (rel)", e, 1e-6});
    }
    {
        const RadialProfile q0 = conductivity_to_potential(default_example2_conductivity());
        checks.push_back({"conductivity type mu_0 = 0", std::abs(dn_eigenvalue(q0, 0)), 1e-8});
    }
    {
        const auto [x, w] = quad::composite_nodes({0.0, 0.8, 0.9}, 4, 20);
        double ref = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ref += w[i] * test_bump(x[i], 0.8, 0.9) * x[i];
        ref *= two_pi;
        const double got = mu_prime_at_zero(RadialProfile::zero(), TestBump(0.8, 0.9).profile());
        checks.push_back({"mu'(0) vs 2 pi int w r dr (rel)", std::abs(got - ref) / ref, 1e-8});
    }
    checks.push_back({"H_1(0) = -gamma / 2 pi", std::abs(HkEvaluator(Complex(1.0, 0.0)).h1_part(Complex(1e-9, 0.0)).value - h_zero), 1e-8});
    {
        double worst = 0.0;
        for (Complex z : {Complex(0.5, 0.3), Complex(-1.2, 0.7), Complex(0.0, -2.0), Complex(2.5, 0.1)}) {
            const oracle::OracleResult o = oracle::gk_integral_oracle(z);
            worst = std::max(worst, std::abs(g1(z) - o.value) / (3.0 * o.estimated_error));
        }
        checks.push_back({"g_1 vs Fourier integral (x 3 est. err)", worst, 1.0});
    }
    {
        const RadialProfile bump = TestBump(0.8, 0.9).profile();
        double e = 0.0;
        for (double lam : {-0.5, 0.5}) {
            const DNSpectrum s = dn_spectrum(family_member(RadialProfile::zero(), bump, lam).combined, 12);
            const BoundarySystem sys = assemble_system(Complex(0.01, 0.0), s);
            e = std::max(e, std::abs(zero_mode_component(sys) - zero_mode_diagnostic(s.mu[0], 0.01)));
        }
        checks.push_back({"zero-mode identity at |k| = 0.01", e, 1e-5});
    }

    int failed = 0;
    std::printf("%-40s %12s %10s  %s\n", "check", "error", "tol", "result");
    for (const Check& c : checks) {
        const bool ok = c.error <= c.tolerance;
        failed += ok ? 0 : 1;
        std::printf("%-40s %12.3e %10.1e  %s\n", c.name.c_str(), c.error, c.tolerance, ok ? "PASS" : "FAIL");
    }
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"excircle: exceptional circles of radial potentials"};
    app.require_subcommand(1);

    std::string config_path, out_dir, cache_dir;
    int workers = 0, N = 0, points = 201;
    bool no_cache = false, clear = false;
    double lambda = 0.0, k = 1.0, extent = 1.0;

    auto* sweep = app.add_subcommand("sweep", "Run a lambda x |k| sweep and write its outputs");
    sweep->add_option("--config", config_path, "Config file (key = value)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--workers", workers, "Override worker count");
    sweep->add_option("--output", out_dir, "Override output directory");
    sweep->add_flag("--no-cache", no_cache, "Do not read or write the H_k cache");

    auto* profile = app.add_subcommand("profile", "Scattering transform along |k| for one lambda (CSV on stdout)");
    profile->add_option("--lambda", lambda, "Family parameter")->required();
    profile->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);

    auto* spectrum = app.add_subcommand("spectrum", "DN spectrum for one lambda (CSV on stdout)");
    spectrum->add_option("--lambda", lambda, "Family parameter")->required();
    spectrum->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    spectrum->add_option("-N", N, "Truncation order (default from config)");

    auto* potential = app.add_subcommand("potential", "Radial potential profile r,value (CSV on stdout)");
    potential->add_option("--lambda", lambda, "Family parameter");
    potential->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    potential->add_option("--points", points, "Number of radii")->check(CLI::Range(2, 1000000));

    app.add_subcommand("verify", "Run the oracle checks and print a pass/fail table");

    auto* cache = app.add_subcommand("cache", "Inspect or clear the H_k cache");
    cache->add_flag("--clear", clear, "Delete all cached matrices");
    cache->add_option("--dir", cache_dir, "Cache directory (default $EXCIRCLE_CACHE_DIR or ./.excircle_cache)");

    auto* hk_dump = app.add_subcommand("hk-dump", "H_k on a square grid of z (CSV on stdout)");
    hk_dump->add_option("--k", k, "|k| (real k)")->check(CLI::PositiveNumber);
    hk_dump->add_option("--extent", extent, "Half width of the grid")->check(CLI::Range(0.0, 2.0 / std::sqrt(2.0)));
    hk_dump->add_option("--points", points, "Points per side")->check(CLI::Range(2, 2000));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) return cmd_sweep(config_path, workers, out_dir, no_cache);
        if (*profile) return cmd_profile(config_path, lambda);
        if (*spectrum) return cmd_spectrum(config_path, lambda, N);
        if (*potential) return cmd_potential(config_path, lambda, points);
        if (app.got_subcommand("verify")) return cmd_verify();
        if (*cache) return cmd_cache(cache_dir, clear);
        if (*hk_dump) return cmd_hk_dump(k, extent, points);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
