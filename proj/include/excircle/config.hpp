#pragma once

// Run configuration: flat "key = value" text, '#' starts a comment.
//
//   example        = example1 | example2 | custom
//   lambda_grid    = start:stop:step
//   k_grid         = start:stop:step[, start:stop:step ...]   (segments ascending)
//   N, M           = truncation order, quadrature nodes
//   w_r1, w_r2     = radii of the bump w
//   sigma_amplitude, sigma_r1, sigma_r2   = sigma = 1 + a w(r; r1, r2) (example2/custom)
//   output_dir, cache (true/false), cache_dir, workers
//   blowup_threshold, sv_threshold, bisection_tol

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "excircle/errors.hpp"
#include "excircle/potentials.hpp"

namespace excircle {

enum class ExampleKind { Example1, Example2, Custom };

struct GridSegment {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
};

/// Points start + i*step up to stop (inclusive within 1e-9 step), rounded to
/// 12 decimals so the grid prints cleanly.
inline std::vector<double> expand_segment(const GridSegment& g) {
    if (!(g.step > 0.0)) throw ParameterError("grid step must be positive");
    if (g.stop < g.start) throw ParameterError("grid stop must not precede start");
    const auto count = static_cast<long>(std::floor((g.stop - g.start) / g.step + 1e-9)) + 1;
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) v.push_back(std::round((g.start + i * g.step) * 1e12) / 1e12);
    return v;
}

inline std::vector<double> expand_grid(const std::vector<GridSegment>& segments) {
    std::vector<double> out;
    for (const GridSegment& s : segments) {
        for (double x : expand_segment(s)) {
            if (!out.empty() && x <= out.back()) continue;
            out.push_back(x);
        }
    }
    return out;
}

struct SweepConfig {
    ExampleKind example = ExampleKind::Example1;
    GridSegment lambda_grid{-2.0, 2.0, 0.25};
    std::vector<GridSegment> k_grid{{0.0005, 0.05, 0.0005}, {0.051, 0.4, 0.001}, {0.41, 3.5, 0.01}};
    int N = 12;
    int M = 256;
    std::optional<SigmaParams> sigma_params;
    double w_r1 = 0.8;
    double w_r2 = 0.9;
    std::string output_dir = "excircle_out";
    bool cache = true;
    std::string cache_dir;  ///< empty: $EXCIRCLE_CACHE_DIR or ./.excircle_cache
    int workers = 1;
    double blowup_threshold = 50.0;
    double sv_threshold = 1e-3;
    double bisection_tol = 1e-4;

    void validate() const {
        if (k_grid.empty()) throw ParameterError("k_grid: at least one segment");
        for (const GridSegment& s : k_grid) {
            if (!(s.start > 0.0)) throw ParameterError("k_grid must start above zero");
            if (!(s.step > 0.0)) throw ParameterError("k_grid step must be positive");
        }
        if (!(lambda_grid.step > 0.0)) throw ParameterError("lambda_grid step must be positive");
        if (N < 1 || N > 25) throw ParameterError("N must lie in [1, 25]");
        if (M < 8 * N || (M & (M - 1)) != 0) throw ParameterError("M must be a power of two >= 8N");
        if (workers < 1) throw ParameterError("workers must be at least 1");
        TestBump(w_r1, w_r2);
        if (sigma_params) TestBump(sigma_params->r1, sigma_params->r2);
    }
};

inline const char* to_string(ExampleKind e) {
    switch (e) {
        case ExampleKind::Example1: return "example1";
        case ExampleKind::Example2: return "example2";
        case ExampleKind::Custom: return "custom";
    }
    return "?";
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
    }
    if (used != v.size()) throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
    return d;
}

inline int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d)) throw ParameterError("config: '" + key + "' expects an integer");
    return static_cast<int>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParameterError("config: '" + key + "' expects true/false");
}

inline GridSegment parse_segment(const std::string& key, const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) throw ParameterError("config: '" + key + "' expects start:stop:step");
    return {parse_double(key, parts[0]), parse_double(key, parts[1]), parse_double(key, parts[2])};
}

}  // namespace detail

inline SweepConfig parse_config(std::istream& in) {
    SweepConfig c;
    std::map<std::string, double> sigma;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key == "example") {
            if (val == "example1") c.example = ExampleKind::Example1;
            else if (val == "example2") c.example = ExampleKind::Example2;
            else if (val == "custom") c.example = ExampleKind::Custom;
            else throw ParameterError("config: unknown example '" + val + "'");
        } else if (key == "lambda_grid") {
            c.lambda_grid = detail::parse_segment(key, val);
        } else if (key == "k_grid") {
            c.k_grid.clear();
            std::stringstream ss(val);
            std::string seg;
            while (std::getline(ss, seg, ',')) c.k_grid.push_back(detail::parse_segment(key, detail::trim(seg)));
        } else if (key == "N") {
            c.N = detail::parse_int(key, val);
        } else if (key == "M") {
            c.M = detail::parse_int(key, val);
        } else if (key == "w_r1") {
            c.w_r1 = detail::parse_double(key, val);
        } else if (key == "w_r2") {
            c.w_r2 = detail::parse_double(key, val);
        } else if (key == "sigma_amplitude" || key == "sigma_r1" || key == "sigma_r2") {
            sigma[key] = detail::parse_double(key, val);
        } else if (key == "output_dir") {
            c.output_dir = val;
        } else if (key == "cache") {
            c.cache = detail::parse_bool(key, val);
        } else if (key == "cache_dir") {
            c.cache_dir = val;
        } else if (key == "workers") {
            c.workers = detail::parse_int(key, val);
        } else if (key == "blowup_threshold") {
            c.blowup_threshold = detail::parse_double(key, val);
        } else if (key == "sv_threshold") {
            c.sv_threshold = detail::parse_double(key, val);
        } else if (key == "bisection_tol") {
            c.bisection_tol = detail::parse_double(key, val);
        } else {
            throw ParameterError("config: unknown key '" + key + "'");
        }
    }
    if (!sigma.empty() || c.example == ExampleKind::Example2) {
        SigmaParams p;
        if (auto it = sigma.find("sigma_amplitude"); it != sigma.end()) p.amplitude = it->second;
        if (auto it = sigma.find("sigma_r1"); it != sigma.end()) p.r1 = it->second;
        if (auto it = sigma.find("sigma_r2"); it != sigma.end()) p.r2 = it->second;
        c.sigma_params = p;
    }
    c.validate();
    return c;
}

inline SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Base potential q0 for the configured example: 0 for example1, the
/// conductivity-type potential of sigma otherwise (0 for custom without sigma).
inline RadialProfile base_potential(const SweepConfig& c) {
    if (c.example == ExampleKind::Example1 || !c.sigma_params) return RadialProfile::zero();
    return conductivity_to_potential(default_example2_conductivity(*c.sigma_params));
}

}  // namespace excircle
