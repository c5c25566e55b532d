#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "rml/errors.hpp"
#include "rml/grid.hpp"
#include "rml/quadrature.hpp"
#include "rml/special.hpp"

namespace rml {

/// Solitary-wave profile psi_c centered so its first moment vanishes:
///   psi_c(x) = e^{-cx/2 + c^3/12} Ai(c^2/4 - x).
/// Exists for every c > 0 and for no c <= 0.
inline double solitary_wave(double c, double x) {
    if (!(c > 0.0))
        throw NoSolitaryWaveError("solitary_wave: no solitary wave exists for c <= 0");
    const double ai = airy_ai(c * c / 4.0 - x);
    const double expo = -0.5 * c * x + c * c * c / 12.0;
    if (expo > 700.0)
        throw OverflowError("solitary_wave: exponent out of range");
    return std::exp(expo) * ai;
}

/// Translated wave phi_{alpha,c}(x) = psi_c(x - alpha), whose mean is alpha.
struct WaveProfile {
    double c;
    double alpha;
    GridFunction samples;
};

/// Samples phi_{alpha,c} on [x_lo, x_hi]. The auto-sized window (x_lo == x_hi)
/// makes both tail contributions to the first two integrals < 1e-9 for
/// c >= 0.8; the right edge is capped by the Ai evaluation domain, so slower
/// waves need an explicit window and accept a larger truncation error.
inline WaveProfile make_wave_profile(double c, double alpha, double x_lo = 0.0, double x_hi = 0.0,
                                     std::size_t n = 20001) {
    if (!(c > 0.0))
        throw NoSolitaryWaveError("make_wave_profile: no solitary wave exists for c <= 0");
    if (x_lo == x_hi) {
        x_lo = alpha + c * c / 4.0 - 14.0;
        x_hi = alpha + c * c / 4.0 + std::min(2.0 * 45.0 / c, 49.5);
    }
    GridFunction samples =
        GridFunction::sample(x_lo, x_hi, n, [&](double x) { return solitary_wave(c, x - alpha); });
    return WaveProfile{c, alpha, std::move(samples)};
}

/// Sup of |psi'' + c psi' + x psi| over the interior of the window, with
/// 5-point central stencils; the defining equation of the wave.
inline double wave_residual(double c, const GridFunction& window) {
    if (!(c > 0.0))
        throw NoSolitaryWaveError("wave_residual: no solitary wave exists for c <= 0");
    const std::size_t n = window.size();
    if (n < 5) throw std::invalid_argument("wave_residual: window needs at least 5 points");
    const double h = window.dx();
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = solitary_wave(c, window.x(i));
    double sup = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double d1 =
            (psi[i - 2] - 8.0 * psi[i - 1] + 8.0 * psi[i + 1] - psi[i + 2]) / (12.0 * h);
        const double d2 = (-psi[i - 2] + 16.0 * psi[i - 1] - 30.0 * psi[i] + 16.0 * psi[i + 1] -
                           psi[i + 2]) /
                          (12.0 * h * h);
        sup = std::max(sup, std::abs(d2 + c * d1 + window.x(i) * psi[i]));
    }
    return sup;
}

/// The wave by its Fourier representation,
///   psi(x) = (1/2pi) int e^{-i xi^3/3 - c xi^2/2} e^{i x xi} d xi,
/// integrated along the damped contour the derivation shifts to: the Gaussian
/// factor e^{-c xi^2/2} makes the oscillatory integral absolutely convergent.
/// Returns (real, imaginary); the imaginary part must vanish for real waves.
inline std::pair<double, double> wave_from_fourier_parts(double c, double x) {
    if (!(c > 0.0))
        throw NoSolitaryWaveError("wave_from_fourier: no solitary wave exists for c <= 0");
    const double s_max = std::sqrt(2.0 * 45.0 / c);
    const QuadOptions opt{.rel_tol = 1e-11, .abs_tol = 1e-13, .max_intervals = 40000};
    auto damped_cos = [c, x](double s) {
        return std::exp(-0.5 * c * s * s) * std::cos(s * s * s / 3.0 - x * s);
    };
    auto damped_sin = [c, x](double s) {
        return std::exp(-0.5 * c * s * s) * std::sin(s * s * s / 3.0 - x * s);
    };
    const double re = (integrate(damped_cos, -s_max, 0.0, opt) + integrate(damped_cos, 0.0, s_max, opt)) /
                      (2.0 * std::numbers::pi);
    const double im = -(integrate(damped_sin, -s_max, 0.0, opt) + integrate(damped_sin, 0.0, s_max, opt)) /
                      (2.0 * std::numbers::pi);
    return {re, im};
}

inline double wave_from_fourier(double c, double x) {
    return wave_from_fourier_parts(c, x).first;
}

/// Number of strict sign changes of psi_c on [x_lo, x_hi].
inline int sign_changes(double c, double x_lo, double x_hi, double spacing = 5e-4) {
    if (!(c > 0.0))
        throw NoSolitaryWaveError("sign_changes: no solitary wave exists for c <= 0");
    if (!(x_lo < x_hi)) throw std::invalid_argument("sign_changes: empty window");
    const auto n = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / spacing)) + 1;
    int count = 0;
    double prev = solitary_wave(c, x_lo);
    for (std::size_t i = 1; i < n; ++i) {
        const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double cur = solitary_wave(c, x);
        if (prev != 0.0 && cur != 0.0 && std::signbit(prev) != std::signbit(cur)) ++count;
        if (cur != 0.0) prev = cur;
    }
    return count;
}

} // namespace rml
