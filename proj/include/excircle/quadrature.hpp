#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace excircle::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Composite Gauss-Legendre nodes/weights over consecutive breakpoints.
/// Returns (r_i, w_i) such that sum w_i f(r_i) ~ integral of f over
/// [breaks.front(), breaks.back()].
inline std::pair<std::vector<double>, std::vector<double>>
composite_nodes(const std::vector<double>& breaks, int panels_per_segment, int order) {
    const GaussRule rule = gauss_legendre(order);
    std::vector<double> x, w;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a0 = breaks[s], b0 = breaks[s + 1];
        if (!(b0 > a0)) continue;
        const double h = (b0 - a0) / panels_per_segment;
        for (int p = 0; p < panels_per_segment; ++p) {
            const double a = a0 + p * h;
            for (int i = 0; i < order; ++i) {
                x.push_back(a + 0.5 * h * (rule.nodes[i] + 1.0));
                w.push_back(0.5 * h * rule.weights[i]);
            }
        }
    }
    return {std::move(x), std::move(w)};
}

}  // namespace excircle::quad
