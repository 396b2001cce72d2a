#pragma once

// Batch lambda x |k| sweep: spectra, H_k matrices, scattering samples,
// exceptional-radius detection, and the files written from them.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "excircle/analysis.hpp"
#include "excircle/bie.hpp"
#include "excircle/config.hpp"
#include "excircle/errors.hpp"
#include "excircle/hk_cache.hpp"
#include "excircle/potentials.hpp"
#include "excircle/radial_dn.hpp"

namespace excircle {

struct SweepResult {
    SweepConfig config;
    std::vector<double> lambdas;
    std::vector<double> k_values;
    std::vector<DNSpectrum> spectra;        ///< one per lambda
    std::vector<ScatteringSample> samples;  ///< row-major: lambda index, then k index
    std::vector<ExceptionalReport> reports;
    std::vector<std::pair<std::string, double>> timing;  ///< seconds per phase
    int cache_hits = 0;
    int cache_checked = 0;
    double cache_max_deviation = 0.0;

    const ScatteringSample& at(std::size_t li, std::size_t ki) const { return samples.at(li * k_values.size() + ki); }
    std::span<const ScatteringSample> row(std::size_t li) const {
        return std::span<const ScatteringSample>(samples).subspan(li * k_values.size(), k_values.size());
    }
};

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception is rethrown after all threads have joined.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Potential q_lambda = base + lambda * w for the configured example.
inline RadialProfile sweep_potential(const SweepConfig& c, double lambda) {
    return family_member(base_potential(c), TestBump(c.w_r1, c.w_r2).profile(), lambda).combined;
}

inline SweepResult run_sweep(const SweepConfig& config) {
    config.validate();
    using clock = std::chrono::steady_clock;
    SweepResult res;
    res.config = config;
    res.lambdas = expand_segment(config.lambda_grid);
    res.k_values = expand_grid(config.k_grid);
    const std::size_t nl = res.lambdas.size(), nk = res.k_values.size();
    const int N = config.N, M = config.M;

    std::optional<HkCache> cache;
    if (config.cache) cache.emplace(config.cache_dir.empty() ? HkCache::default_dir() : std::filesystem::path(config.cache_dir));
    const HkCache* cache_ptr = cache ? &*cache : nullptr;

    auto phase = [&](const char* name, auto&& fn) {
        const auto t0 = clock::now();
        fn();
        res.timing.emplace_back(name, std::chrono::duration<double>(clock::now() - t0).count());
    };

    const RadialProfile base = base_potential(config);
    const RadialProfile bump = TestBump(config.w_r1, config.w_r2).profile();
    std::vector<RadialProfile> potentials;
    potentials.reserve(nl);
    for (double lam : res.lambdas) potentials.push_back(family_member(base, bump, lam).combined);

    phase("spectra", [&] {
        res.spectra.resize(nl);
        parallel_for(nl, config.workers,
                     [&](std::size_t i) { res.spectra[i] = dn_spectrum(potentials[i], N, res.lambdas[i]); });
    });

    std::vector<ComplexMatrix> hk(nk);
    phase("hk", [&] {
        std::vector<char> hit(nk, 0);
        parallel_for(nk, config.workers, [&](std::size_t j) {
            const Complex k(res.k_values[j], 0.0);
            if (cache_ptr) {
                if (auto m = cache_ptr->load(k, N, M)) {
                    hk[j] = std::move(*m);
                    hit[j] = 1;
                    return;
                }
            }
            hk[j] = assemble_hk_matrix(k, N, M);
            if (cache_ptr) cache_ptr->store(k, N, M, hk[j]);
        });
        res.cache_hits = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
    });

    phase("cache_check", [&] {
        if (!cache_ptr || nk == 0) return;
        std::mt19937 rng(20240611u);
        std::uniform_int_distribution<std::size_t> pick(0, nk - 1);
        for (int s = 0; s < 3; ++s) {
            const std::size_t j = pick(rng);
            const Complex k(res.k_values[j], 0.0);
            const auto stored = cache_ptr->load(k, N, M);
            if (!stored) continue;
            const ComplexMatrix fresh = assemble_hk_matrix(k, N, M);
            res.cache_max_deviation = std::max(res.cache_max_deviation, (*stored - fresh).cwiseAbs().maxCoeff());
            ++res.cache_checked;
        }
    });

    phase("samples", [&] {
        res.samples.resize(nl * nk);
        parallel_for(nl * nk, config.workers, [&](std::size_t idx) {
            const std::size_t li = idx / nk, kj = idx % nk;
            res.samples[idx] = sample_scattering(Complex(res.k_values[kj], 0.0), res.spectra[li], hk[kj], M);
        });
    });

    phase("detection", [&] {
        DetectionOptions opt;
        opt.blowup_threshold = config.blowup_threshold;
        opt.sv_threshold = config.sv_threshold;
        opt.bisection_tolerance = config.bisection_tol;
        res.reports.resize(nl);
        parallel_for(nl, config.workers, [&](std::size_t li) {
            const DNSpectrum& spec = res.spectra[li];
            ScatteringResolver resolve = [&spec, M](double km) {
                return sample_scattering(Complex(km, 0.0), spec, std::nullopt, M);
            };
            res.reports[li] = analyze_row(res.lambdas[li], res.row(li), spec.mu_at(0), potentials[li], resolve, opt);
        });
    });
    return res;
}

/// FNV-1a 64-bit digest of a byte string.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string samples_csv(const SweepResult& r) {
    std::string out = "lambda,k,re_t,im_t,zero_mode_diag,min_sv,flag\n";
    for (std::size_t li = 0; li < r.lambdas.size(); ++li) {
        for (std::size_t kj = 0; kj < r.k_values.size(); ++kj) {
            const ScatteringSample& s = r.at(li, kj);
            out += format_number(r.lambdas[li]) + ',' + format_number(s.k_modulus) + ',' +
                   format_number(s.t.real()) + ',' + format_number(s.t.imag()) + ',' +
                   format_number(s.zero_mode_diag) + ',' + format_number(s.min_sv) + ',' +
                   std::to_string(s.flags) + '\n';
        }
    }
    return out;
}

inline std::string spectra_csv(const SweepResult& r) {
    std::string out = "lambda,n,mu_n,nu_n,pole_flag\n";
    for (const DNSpectrum& s : r.spectra) {
        for (int n = 0; n <= s.N; ++n) {
            out += format_number(s.lambda) + ',' + std::to_string(n) + ',' + format_number(s.mu[n]) + ',' +
                   format_number(s.nu[n]) + ',' + (s.pole_modes[n] ? "1" : "0") + '\n';
        }
    }
    return out;
}

inline std::string reports_json(const SweepResult& r) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ExceptionalReport& rep : r.reports) arr.push_back(to_json(rep));
    return arr.dump(2) + '\n';
}

inline constexpr double map_clamp = 20.0;

/// Binary PGM: one column per lambda, one row per |k| with the largest |k|
/// on top. Re t is clamped to +-20 and mapped linearly to 0..255; non-finite
/// samples are black.
inline std::string map_pgm(const SweepResult& r) {
    const std::size_t w = r.lambdas.size(), h = r.k_values.size();
    std::string out = "P5\n" + std::to_string(w) + ' ' + std::to_string(h) + "\n255\n";
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t kj = h - 1 - row;
        for (std::size_t li = 0; li < w; ++li) {
            const double v = r.at(li, kj).t.real();
            unsigned char px = 0;
            if (std::isfinite(v)) {
                const double c = std::clamp(v, -map_clamp, map_clamp);
                px = static_cast<unsigned char>(std::lround((c + map_clamp) / (2.0 * map_clamp) * 255.0));
            }
            out.push_back(static_cast<char>(px));
        }
    }
    return out;
}

inline nlohmann::json config_json(const SweepConfig& c) {
    nlohmann::json kg = nlohmann::json::array();
    for (const GridSegment& s : c.k_grid) kg.push_back({s.start, s.stop, s.step});
    nlohmann::json j;
    j["example"] = to_string(c.example);
    j["lambda_grid"] = {c.lambda_grid.start, c.lambda_grid.stop, c.lambda_grid.step};
    j["k_grid"] = kg;
    j["N"] = c.N;
    j["M"] = c.M;
    j["w_params"] = {c.w_r1, c.w_r2};
    if (c.sigma_params)
        j["sigma_params"] = {c.sigma_params->amplitude, c.sigma_params->r1, c.sigma_params->r2};
    else
        j["sigma_params"] = nullptr;
    j["output_dir"] = c.output_dir;
    j["cache"] = c.cache;
    j["workers"] = c.workers;
    j["blowup_threshold"] = c.blowup_threshold;
    j["sv_threshold"] = c.sv_threshold;
    j["bisection_tol"] = c.bisection_tol;
    return j;
}

struct ManifestEntry {
    std::string file;
    std::uintmax_t bytes = 0;
    std::uint64_t fnv1a = 0;
};

/// Writes samples.csv, spectra.csv, reports.json, map.pgm and manifest.json
/// into dir. If a write fails, the manifest of the files completed so far is
/// written before the error propagates.
inline std::vector<ManifestEntry> emit_outputs(const SweepResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<ManifestEntry> done;

    auto write_manifest = [&](const std::string& error) {
        nlohmann::json files = nlohmann::json::array();
        for (const ManifestEntry& e : done) {
            char hex[17];
            std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(e.fnv1a));
            files.push_back({{"file", e.file}, {"bytes", e.bytes}, {"fnv1a64", hex}});
        }
        nlohmann::json timing = nlohmann::json::object();
        for (const auto& [name, secs] : r.timing) timing[name] = secs;
        nlohmann::json m;
        m["config"] = config_json(r.config);
        m["files"] = files;
        m["grid"] = {{"lambdas", r.lambdas.size()}, {"k_values", r.k_values.size()}};
        m["timing_s"] = timing;
        m["cache"] = {{"hits", r.cache_hits},
                      {"checked", r.cache_checked},
                      {"max_deviation", r.cache_max_deviation}};
        m["complete"] = error.empty();
        if (!error.empty()) m["error"] = error;
        std::ofstream os(dir / "manifest.json", std::ios::binary);
        os << m.dump(2) << '\n';
    };

    auto write_file = [&](const std::string& name, const std::string& content) {
        {
            std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
            os.write(content.data(), static_cast<std::streamsize>(content.size()));
            os.flush();
            if (!os) {
                const std::string msg = "failed writing " + (dir / name).string();
                write_manifest(msg);
                throw std::runtime_error(msg);
            }
        }
        done.push_back({name, content.size(), fnv1a64(content)});
    };

    write_file("samples.csv", samples_csv(r));
    write_file("spectra.csv", spectra_csv(r));
    write_file("reports.json", reports_json(r));
    write_file("map.pgm", map_pgm(r));
    write_manifest({});
    return done;
}

}  // namespace excircle
