#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rml/errors.hpp"

namespace rml {

struct SpecialFnConfig {
    /// |x| switch point between the Maclaurin series and the asymptotic
    /// expansions for Ai. The series loses e^{2 zeta} digits against the
    /// decaying branch for x > 0, so the positive side switches no later than
    /// 6.5 regardless; the negative side keeps the series out to this cutoff,
    /// where the oscillatory asymptotics are already at ~1e-13.
    double series_cutoff = 9.0;
    /// Tolerance handed to quadrature-backed evaluators built on top of these
    /// functions (transform kernels, test oracles).
    double quad_tol = 1e-12;

    void validate() const {
        if (!(series_cutoff > 0.0))
            throw std::invalid_argument("SpecialFnConfig: series_cutoff must be > 0");
        if (!(quad_tol > 0.0 && quad_tol < 1.0))
            throw std::invalid_argument("SpecialFnConfig: quad_tol must be in (0, 1)");
    }
};

inline constexpr double kSqrt2Pi = 2.5066282746310005024;

/// Upper Gaussian tail integral Erf(theta) = int_theta^inf e^{-z^2/2} dz.
///
/// This is NOT the usual erf; the sqrt(2) scaling of the standard
/// complementary error function is folded in here and nowhere else.
inline double erf_upper(double theta) {
    return std::sqrt(std::numbers::pi / 2.0) * std::erfc(theta / std::numbers::sqrt2);
}

/// log of erf_upper, valid far beyond the underflow point of erf_upper itself.
inline double log_erf_upper(double theta) {
    if (theta < 30.0) return std::log(erf_upper(theta));
    // Erf(theta) = e^{-theta^2/2}/theta * (1 - 1/theta^2 + 3/theta^4 - 15/theta^6 + ...)
    const double r = 1.0 / (theta * theta);
    const double series = -r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
    return -0.5 * theta * theta - std::log(theta) + std::log1p(series);
}

namespace detail {

inline constexpr long double kAi0 = 0.35502805388781723926L;   // 3^(-2/3)/Gamma(2/3)
inline constexpr long double kAip0 = -0.25881940379280679840L; // -3^(-1/3)/Gamma(1/3)

/// Maclaurin series Ai(x) = Ai(0) f(x) + Ai'(0) g(x), evaluated in extended
/// precision: the two branches cancel heavily for x < 0.
inline long double airy_series(long double x) {
    const long double x3 = x * x * x;
    long double f_term = 1.0L, f_sum = 1.0L;
    long double g_term = x, g_sum = x;
    for (int k = 0; k < 120; ++k) {
        const long double k3 = 3.0L * k;
        f_term *= x3 / ((k3 + 2.0L) * (k3 + 3.0L));
        g_term *= x3 / ((k3 + 3.0L) * (k3 + 4.0L));
        f_sum += f_term;
        g_sum += g_term;
        if (std::abs(f_term) < 1e-24L * std::abs(f_sum) &&
            std::abs(g_term) < 1e-24L * std::abs(g_sum))
            break;
    }
    return kAi0 * f_sum + kAip0 * g_sum;
}

/// Asymptotic expansion for x >> 0:
///   Ai(x) = e^{-zeta}/(2 sqrt(pi) x^{1/4}) * sum (-1)^k u_k zeta^{-k},
/// zeta = (2/3) x^{3/2}, truncated at the smallest term.
inline long double airy_asymptotic_pos(long double x) {
    const long double zeta = 2.0L / 3.0L * std::pow(x, 1.5L);
    long double u = 1.0L, sum = 1.0L, prev = 1.0L;
    long double sign = -1.0L, zk = 1.0L;
    for (int k = 1; k <= 60; ++k) {
        u *= (6.0L * k - 5.0L) * (6.0L * k - 3.0L) * (6.0L * k - 1.0L) /
             (216.0L * k * (2.0L * k - 1.0L));
        zk *= zeta;
        const long double term = u / zk;
        if (term > prev) break; // divergent tail reached
        sum += sign * term;
        prev = term;
        sign = -sign;
        if (term < 1e-24L) break;
    }
    return std::exp(-zeta) / (2.0L * std::sqrt((long double)std::numbers::pi) * std::pow(x, 0.25L)) * sum;
}

/// Oscillatory asymptotics for x << 0:
///   Ai(-z) = (cos(zeta - pi/4) P + sin(zeta - pi/4) Q) / (sqrt(pi) z^{1/4}).
inline long double airy_asymptotic_neg(long double xneg) {
    const long double z = -xneg;
    const long double zeta = 2.0L / 3.0L * std::pow(z, 1.5L);
    long double u = 1.0L; // u_k running coefficient
    long double P = 1.0L, Q = 0.0L;
    long double zk = 1.0L, prev = 1.0L;
    for (int k = 1; k <= 60; ++k) {
        u *= (6.0L * k - 5.0L) * (6.0L * k - 3.0L) * (6.0L * k - 1.0L) /
             (216.0L * k * (2.0L * k - 1.0L));
        zk *= zeta;
        const long double term = u / zk;
        if (term > prev) break;
        prev = term;
        // k odd -> Q series, k even -> P series, signs alternate within each.
        const int half = k / 2;
        const long double s = (half % 2 == 0) ? 1.0L : -1.0L;
        if (k % 2 == 1)
            Q += s * term;
        else
            P += s * term;
        if (term < 1e-24L) break;
    }
    const long double phase = zeta - (long double)std::numbers::pi / 4.0L;
    return (std::cos(phase) * P + std::sin(phase) * Q) /
           (std::sqrt((long double)std::numbers::pi) * std::pow(z, 0.25L));
}

} // namespace detail

/// Airy function Ai(x). Documented accuracy: relative error <= 1e-9 for
/// |x| <= 10 (away from zeros) and <= 1e-6 up to |x| = 50.
inline double airy_ai(double x, const SpecialFnConfig& cfg = {}) {
    cfg.validate();
    if (!std::isfinite(x) || std::abs(x) > 50.0)
        throw DomainError("airy_ai: |x| <= 50 required");
    const long double xl = x;
    if (x >= 0.0) {
        if (x <= std::min(cfg.series_cutoff, 6.5))
            return static_cast<double>(detail::airy_series(xl));
        return static_cast<double>(detail::airy_asymptotic_pos(xl));
    }
    if (-x <= cfg.series_cutoff)
        return static_cast<double>(detail::airy_series(xl));
    return static_cast<double>(detail::airy_asymptotic_neg(xl));
}

/// Heat kernel (4 pi t)^{-1/2} e^{-(x-y)^2/(4t)}, t > 0.
inline double heat_kernel(double t, double x, double y) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t > 0 required");
    const double d = x - y;
    return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

inline double log_heat_kernel(double t, double x, double y) {
    if (!(t > 0.0)) throw std::invalid_argument("log_heat_kernel: t > 0 required");
    const double d = x - y;
    return -d * d / (4.0 * t) - 0.5 * std::log(4.0 * std::numbers::pi * t);
}

} // namespace rml
