#pragma once

// Fourier-truncated boundary integral equation on the unit circle
//
//   [I + (S_0 + H_k - log|k| P)(L_q - L_0)] psi^ = (e^{ikz})^
//
// and the boundary formula for the scattering transform t(k).
// Vectors are indexed n = -N..N, slot n + N.

#include <cmath>
#include <complex>
#include <numbers>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "excircle/errors.hpp"
#include "excircle/faddeev_kernel.hpp"
#include "excircle/radial_dn.hpp"

namespace excircle {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int default_truncation = 12;
inline constexpr int default_quadrature_nodes = 256;
inline constexpr int max_truncation = 25;

/// Coefficients of a boundary function in the basis e^{in theta}/sqrt(2 pi).
struct FourierTrace {
    int N = 0;
    ComplexVector coeff;

    Complex& operator[](int n) { return coeff(n + N); }
    Complex operator[](int n) const { return coeff(n + N); }

    /// sum (1+|n|) |a_n|^2
    double h_half_norm_squared() const {
        double s = 0.0;
        for (int n = -N; n <= N; ++n) s += (1.0 + std::abs(n)) * std::norm((*this)[n]);
        return s;
    }
};

namespace detail {

inline bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

inline void check_nodes(int N, int M) {
    if (N < 1 || N > max_truncation) throw ParameterError("truncation order N must lie in [1, 25]");
    if (!is_power_of_two(M) || M < 8 * N)
        throw ParameterError("quadrature nodes M must be a power of two and at least 8N");
}

}  // namespace detail

/// H_k(m,n) = (1/2pi) int int H_1(k(z - z')) e^{in theta'} e^{-im theta} dtheta' dtheta
/// by the M-node periodic trapezoid rule in both variables. The -log|k| P
/// part of the single layer operator is not included.
inline ComplexMatrix assemble_hk_matrix(Complex k, int N, int M = default_quadrature_nodes) {
    if (k == Complex(0.0, 0.0)) throw ParameterError("assemble_hk_matrix: k must be nonzero");
    detail::check_nodes(N, M);
    const HkEvaluator kernel(k);
    const int size = 2 * N + 1;

    std::vector<Complex> z(M);
    for (int j = 0; j < M; ++j) z[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / M);

    ComplexMatrix kmat(M, M);
    for (int j = 0; j < M; ++j)
        for (int l = 0; l < M; ++l) kmat(j, l) = kernel.h1_part(z[j] - z[l]).value;

    ComplexMatrix fourier(M, size);  // e^{i n theta_l}
    for (int l = 0; l < M; ++l)
        for (int n = -N; n <= N; ++n) fourier(l, n + N) = std::polar(1.0, 2.0 * std::numbers::pi * l * n / M);

    const ComplexMatrix projected = kmat * fourier;
    ComplexMatrix hk = fourier.adjoint() * projected;
    hk *= 2.0 * std::numbers::pi / (static_cast<double>(M) * M);
    return hk;
}

struct BoundarySystem {
    Complex k;
    int N = 0;
    Eigen::VectorXd L0;
    Eigen::VectorXd Lq;
    Eigen::VectorXd S0;
    Eigen::VectorXd P;
    ComplexMatrix Hk;
    ComplexMatrix system;
    double min_singular_value = 0.0;
    bool pole_flag = false;
};

/// Builds I + (S0 + Hk - log|k| P)(Lq - L0). `hk` may come from a cache;
/// otherwise it is assembled with M nodes.
inline BoundarySystem assemble_system(Complex k, const DNSpectrum& spectrum,
                                      std::optional<ComplexMatrix> hk = std::nullopt,
                                      int M = default_quadrature_nodes) {
    if (k == Complex(0.0, 0.0)) throw ParameterError("assemble_system: k must be nonzero");
    const int N = spectrum.N;
    const int size = 2 * N + 1;
    BoundarySystem sys;
    sys.k = k;
    sys.N = N;
    sys.pole_flag = spectrum.pole_flag;
    sys.L0.resize(size);
    sys.Lq.resize(size);
    sys.S0.resize(size);
    sys.P = Eigen::VectorXd::Zero(size);
    for (int n = -N; n <= N; ++n) {
        const int i = n + N;
        sys.L0(i) = std::abs(n);
        sys.Lq(i) = spectrum.mu_at(n);
        sys.S0(i) = n == 0 ? 0.0 : 1.0 / (2.0 * std::abs(n));
    }
    sys.P(N) = 1.0;
    sys.Hk = hk ? std::move(*hk) : assemble_hk_matrix(k, N, M);
    if (sys.Hk.rows() != size || sys.Hk.cols() != size)
        throw ParameterError("assemble_system: H_k matrix size does not match the spectrum");

    ComplexMatrix single_layer = sys.Hk;
    for (int i = 0; i < size; ++i) single_layer(i, i) += sys.S0(i) - std::log(std::abs(k)) * sys.P(i);
    const Eigen::VectorXd contrast = sys.Lq - sys.L0;
    sys.system = single_layer * contrast.asDiagonal();
    sys.system += ComplexMatrix::Identity(size, size);

    if (sys.system.allFinite()) {
        Eigen::JacobiSVD<ComplexMatrix> svd(sys.system);
        sys.min_singular_value = svd.singularValues().minCoeff();
    } else {
        sys.min_singular_value = std::numeric_limits<double>::quiet_NaN();
    }
    return sys;
}

/// Fourier vector of e^{ikz} on the unit circle: sqrt(2pi) (ik)^n / n! for n >= 0.
inline FourierTrace rhs_exponential(Complex k, int N) {
    FourierTrace rhs{N, ComplexVector::Zero(2 * N + 1)};
    Complex a = std::sqrt(2.0 * std::numbers::pi);
    const Complex ik(-k.imag(), k.real());
    for (int n = 0; n <= N; ++n) {
        rhs[n] = a;
        a *= ik / static_cast<double>(n + 1);
    }
    return rhs;
}

struct TraceSolution {
    FourierTrace psi;
    double residual = 0.0;  ///< ||A psi - rhs||
    bool near_singular = false;
};

inline constexpr double singular_threshold = 1e-10;

/// Dense LU with partial pivoting. Near-singular systems are still solved and
/// flagged; their blow-up is what the detector looks for.
inline TraceSolution solve_trace(const BoundarySystem& sys, const FourierTrace& rhs) {
    if (rhs.N != sys.N) throw ParameterError("solve_trace: truncation mismatch");
    TraceSolution out;
    out.near_singular = !(sys.min_singular_value > singular_threshold);
    const Eigen::PartialPivLU<ComplexMatrix> lu(sys.system);
    out.psi = FourierTrace{sys.N, lu.solve(rhs.coeff)};
    out.residual = (sys.system * out.psi.coeff - rhs.coeff).norm();
    return out;
}

/// t(k) ~ int_0^{2pi} e^{i conj(k) e^{-i theta}} g(theta) dtheta with
/// g^ = (Lq - L0) psi^, by the M-node trapezoid rule. Most accurate near k = 0.
inline Complex scattering_transform(Complex k, const FourierTrace& psi, const DNSpectrum& spectrum,
                                    int M = default_quadrature_nodes) {
    if (k == Complex(0.0, 0.0)) throw ParameterError("scattering_transform: k must be nonzero");
    const int N = psi.N;
    std::vector<Complex> ghat(2 * N + 1);
    for (int n = -N; n <= N; ++n) ghat[n + N] = (spectrum.mu_at(n) - std::abs(n)) * psi[n];

    const double inv_sqrt = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const Complex kbar = std::conj(k);
    Complex sum = 0.0;
    for (int j = 0; j < M; ++j) {
        const double th = 2.0 * std::numbers::pi * j / M;
        Complex g = 0.0;
        for (int n = -N; n <= N; ++n) g += ghat[n + N] * std::polar(1.0, n * th);
        const Complex phase = Complex(0.0, 1.0) * kbar * std::polar(1.0, -th);
        sum += std::exp(phase) * g * inv_sqrt;
    }
    return sum * (2.0 * std::numbers::pi / M);
}

/// 1 + mu_0 (2 pi h - log|k|): the zero-mode component of (I + T_k) 1.
inline double zero_mode_diagnostic(double mu0, double k_modulus) {
    return 1.0 + mu0 * (2.0 * std::numbers::pi * h_zero - std::log(k_modulus));
}

/// n = 0 component, as a function value, of the system applied to the constant 1.
inline Complex zero_mode_component(const BoundarySystem& sys) {
    FourierTrace one{sys.N, ComplexVector::Zero(2 * sys.N + 1)};
    one[0] = std::sqrt(2.0 * std::numbers::pi);
    const ComplexVector image = sys.system * one.coeff;
    return image(sys.N) / std::sqrt(2.0 * std::numbers::pi);
}

enum SampleFlag : unsigned {
    flag_none = 0,
    flag_near_singular = 1,
    flag_pole = 2,
    flag_nonfinite = 4,
};

struct ScatteringSample {
    double k_modulus = 0.0;
    Complex k;
    Complex t;
    double zero_mode_diag = 0.0;
    double min_sv = 0.0;
    unsigned flags = flag_none;

    bool flagged() const noexcept { return flags != flag_none; }
};

/// Assemble, solve and evaluate t at one k.
inline ScatteringSample sample_scattering(Complex k, const DNSpectrum& spectrum,
                                          std::optional<ComplexMatrix> hk = std::nullopt,
                                          int M = default_quadrature_nodes) {
    const BoundarySystem sys = assemble_system(k, spectrum, std::move(hk), M);
    ScatteringSample s;
    s.k = k;
    s.k_modulus = std::abs(k);
    s.min_sv = sys.min_singular_value;
    s.zero_mode_diag = zero_mode_diagnostic(spectrum.mu_at(0), s.k_modulus);
    if (sys.pole_flag) s.flags |= flag_pole;
    if (!sys.system.allFinite()) {
        s.flags |= flag_nonfinite;
        s.t = Complex(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
        return s;
    }
    const TraceSolution sol = solve_trace(sys, rhs_exponential(k, spectrum.N));
    if (sol.near_singular) s.flags |= flag_near_singular;
    s.t = scattering_transform(k, sol.psi, spectrum, M);
    if (!std::isfinite(s.t.real()) || !std::isfinite(s.t.imag())) s.flags |= flag_nonfinite;
    return s;
}

}  // namespace excircle
