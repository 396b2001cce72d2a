#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"

#include "excircle/analysis.hpp"

using namespace excircle;
using Catch::Approx;

namespace {

// t = 1/(k - r0) with a singular-value dip at r0
ScatteringSample synthetic(double k, double r0) {
    ScatteringSample s;
    s.k_modulus = k;
    s.k = Complex(k, 0.0);
    s.t = Complex(1.0 / (k - r0), 0.0);
    s.min_sv = std::abs(k - r0);
    return s;
}

std::vector<ScatteringSample> synthetic_row(double r0, double step, double kmax) {
    std::vector<ScatteringSample> v;
    for (double k = step; k <= kmax + 1e-12; k += step) v.push_back(synthetic(k, r0));
    return v;
}

struct Row {
    DNSpectrum spec;
    RadialProfile q;
    std::vector<ScatteringSample> samples;
};

Row example1_row(double lambda, const std::vector<double>& ks) {
    RadialProfile q = family_member(RadialProfile::zero(), TestBump(0.8, 0.9).profile(), lambda).combined;
    Row row{dn_spectrum(q, 12, lambda), q, {}};
    for (double k : ks) row.samples.push_back(sample_scattering(Complex(k, 0.0), row.spec));
    return row;
}

std::vector<double> grid(double start, double stop, double step) {
    std::vector<double> v;
    for (int i = 0; start + i * step <= stop + 1e-12; ++i) v.push_back(start + i * step);
    return v;
}

}  // namespace

TEST_CASE("asymptotic radius law", "[analysis]") {
    const double h = h_zero;
    CHECK(asymptotic_radius(-1.0 / (2.0 * std::numbers::pi * h)) == Approx(1.0).epsilon(1e-14));
    CHECK(asymptotic_radius(-1e-3) < 1e-100);
    CHECK(asymptotic_radius(-0.42598103868226389) == Approx(0.05368).margin(1e-4));
    CHECK_THROWS_AS(asymptotic_radius(0.0), DomainError);
}

TEST_CASE("small-k law", "[analysis]") {
    CHECK(small_k_law(0.01) == Approx(1.36438).margin(1e-5));
    CHECK(small_k_law(std::exp(-1.0)) == Approx(2.0 * std::numbers::pi).epsilon(1e-14));
    CHECK_THROWS_AS(small_k_law(1.0), DomainError);
    CHECK_THROWS_AS(small_k_law(0.0), DomainError);
}

TEST_CASE("zero-mode law reduces to the small-k law as mu grows", "[analysis]") {
    CHECK(zero_mode_law(1e8, 0.01) == Approx(2.0 * std::numbers::pi / (2.0 * std::numbers::pi * h_zero - std::log(0.01))).epsilon(1e-6));
    CHECK(zero_mode_law(0.0, 0.01) == 0.0);
}

TEST_CASE("safe k scale", "[analysis]") {
    CHECK(safe_k_scale(RadialProfile::zero()) == 0.0);
    const RadialProfile q = family_member(RadialProfile::zero(), TestBump(0.8, 0.9).profile(), -5.0).combined;
    CHECK(safe_k_scale(q) == Approx(10.0));
}

TEST_CASE("detector finds a synthetic pole", "[analysis]") {
    const double r0 = 0.3217;
    const auto row = synthetic_row(r0, 0.01, 1.0);
    ScatteringResolver resolve = [r0](double k) { return synthetic(k, r0); };
    const auto found = detect_exceptional_radii(row, resolve);
    REQUIRE(found.size() == 1);
    CHECK(found[0].radius == Approx(r0).margin(1e-4));
    CHECK(found[0].bracket_low < found[0].radius);
    CHECK(found[0].radius < found[0].bracket_high);
    CHECK(found[0].bracket_high - found[0].bracket_low <= 1e-4);
}

TEST_CASE("detector needs both a blow-up and a singular-value dip", "[analysis]") {
    // sign change without blow-up
    std::vector<ScatteringSample> mild;
    for (int i = 1; i <= 50; ++i) {
        ScatteringSample s = synthetic(0.02 * i, 0.0);
        s.t = Complex(std::cos(10.0 * s.k_modulus), 0.0);
        s.min_sv = 0.5;
        mild.push_back(s);
    }
    ScatteringResolver never = [](double) -> ScatteringSample { throw std::logic_error("unused"); };
    CHECK(detect_exceptional_radii(mild, never).empty());

    // blow-up with a healthy singular value
    const double r0 = 0.5;
    auto no_dip = [r0](double k) {
        ScatteringSample s = synthetic(k, r0);
        s.min_sv = 1.0;
        return s;
    };
    std::vector<ScatteringSample> row;
    for (int i = 1; i <= 100; ++i) row.push_back(no_dip(0.0101 * i));
    CHECK(detect_exceptional_radii(row, ScatteringResolver(no_dip)).empty());
}

TEST_CASE("detector rejects unsorted samples", "[analysis]") {
    auto row = synthetic_row(0.3, 0.1, 1.0);
    std::swap(row[2], row[3]);
    CHECK_THROWS_AS(detect_exceptional_radii(row, [](double k) { return synthetic(k, 0.3); }), ParameterError);
}

TEST_CASE("no exceptional circle for positive lambda", "[analysis]") {
    const auto ks = grid(0.01, 3.5, 0.02);
    for (double lam : {0.5, 2.0}) {
        const Row row = example1_row(lam, ks);
        ScatteringResolver resolve = [&](double k) { return sample_scattering(Complex(k, 0.0), row.spec); };
        const ExceptionalReport rep = analyze_row(lam, row.samples, row.spec.mu[0], row.q, resolve);
        CHECK(rep.detected_radii.empty());
        CHECK_FALSE(rep.asymptotic_radius.has_value());
    }
}

TEST_CASE("lambda = -1: one circle near the asymptotic radius, robust to the grid", "[analysis]") {
    const Row coarse = example1_row(-1.0, grid(0.01, 0.5, 0.01));
    const Row fine = example1_row(-1.0, grid(0.005, 0.5, 0.005));
    ScatteringResolver resolve = [&](double k) { return sample_scattering(Complex(k, 0.0), coarse.spec); };
    const ExceptionalReport a = analyze_row(-1.0, coarse.samples, coarse.spec.mu[0], coarse.q, resolve);
    const ExceptionalReport b = analyze_row(-1.0, fine.samples, fine.spec.mu[0], fine.q, resolve);
    REQUIRE(a.detected_radii.size() == 1);
    REQUIRE(b.detected_radii.size() == 1);
    REQUIRE(a.asymptotic_radius.has_value());
    const double r = a.detected_radii[0].radius;
    CHECK(std::abs(r - *a.asymptotic_radius) / *a.asymptotic_radius <= 0.10);
    CHECK(std::abs(r - b.detected_radii[0].radius) < 2e-4);
    CHECK(a.detected_radii[0].min_sv < 1e-3);
    CHECK(a.safe_k_note == Approx(2.0));
    CHECK(std::isfinite(a.small_k_deviation));
}

TEST_CASE("report JSON layout", "[analysis]") {
    ExceptionalReport rep;
    rep.lambda = -1.0;
    rep.detected_radii.push_back({0.05, 0.0499, 0.0501, 1e-5});
    rep.asymptotic_radius = 0.0537;
    rep.safe_k_note = 2.0;
    const auto j = to_json(rep);
    CHECK(j["lambda"] == -1.0);
    CHECK(j["radii"].size() == 1);
    CHECK(j["radii"][0]["r"] == 0.05);
    CHECK(j["radii"][0].contains("lo"));
    CHECK(j["radii"][0].contains("hi"));
    CHECK(j["radii"][0].contains("min_sv"));
    CHECK(j["r_asym"] == 0.0537);
    CHECK(j.contains("small_k_dev"));
    CHECK(j["safe_k_scale"] == 2.0);
    rep.asymptotic_radius.reset();
    CHECK(to_json(rep)["r_asym"].is_null());
}

TEST_CASE("row profiles of the two examples", "[analysis]") {
    const auto ks = grid(0.05, 3.5, 0.05);
    // conductivity type at lambda = 0: bounded, no jump
    {
        const RadialProfile q0 = conductivity_to_potential(default_example2_conductivity());
        const DNSpectrum spec = dn_spectrum(q0, 12, 0.0);
        std::vector<ScatteringSample> row;
        for (double k : ks) row.push_back(sample_scattering(Complex(k, 0.0), spec));
        ScatteringResolver resolve = [&](double k) { return sample_scattering(Complex(k, 0.0), spec); };
        const ExceptionalReport rep = analyze_row(0.0, row, spec.mu[0], q0, resolve);
        CHECK(rep.detected_radii.empty());
        for (const auto& s : row) CHECK(std::abs(s.t) < 5.0);
    }
    // lambda = -5: one singular jump
    {
        const Row row = example1_row(-5.0, ks);
        ScatteringResolver resolve = [&](double k) { return sample_scattering(Complex(k, 0.0), row.spec); };
        const ExceptionalReport rep = analyze_row(-5.0, row.samples, row.spec.mu[0], row.q, resolve);
        CHECK(rep.detected_radii.size() == 1);
    }
}
