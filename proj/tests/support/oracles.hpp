#pragma once

// Test-only oracles, independent of the library paths they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rml/grid.hpp"
#include "rml/profiles.hpp"
#include "rml/quadrature.hpp"

namespace rml::testing {

/// Airy oracle: contour-rotated quadrature of the oscillatory integral along
/// Im xi = eta > 0,
///   Ai(x) = (e^{eta^3/3 - x eta}/pi) int_0^inf e^{-eta s^2}
///             cos(s^3/3 + (x - eta^2) s) ds.
inline double airy_contour(double x) {
    const double eta = std::max(0.5, std::sqrt(std::max(x, 0.0)));
    const double s_max = std::sqrt(52.0 / eta);
    const double prefactor = std::exp(eta * eta * eta / 3.0 - x * eta) / std::numbers::pi;
    const double abs_tol = std::max(1e-12 / prefactor, 4e-15);
    const double val = integrate(
        [x, eta](double s) {
            return std::exp(-eta * s * s) * std::cos(s * s * s / 3.0 + (x - eta * eta) * s);
        },
        0.0, s_max, {.rel_tol = 1e-12, .abs_tol = abs_tol, .max_intervals = 40000});
    return prefactor * val;
}

/// log u0(y), evaluated directly per family: the density itself underflows
/// long before e^{ty} u0(y) does, and quadrature of the moment integrands
/// needs the joint exponent.
inline double log_density(const Profile& p, double y) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto& g = p.as<GaussianProfile>();
            return 0.5 * std::log(g.a / (2.0 * std::numbers::pi)) -
                   0.5 * g.a * (y - g.m) * (y - g.m);
        }
        case ProfileKind::ExponentialTail: {
            const auto& e = p.as<ExponentialTailProfile>();
            return y > 0.0 ? std::log(e.alpha) - e.alpha * y : neg_inf;
        }
        case ProfileKind::ModifiedExponentialTail: {
            const auto& m = p.as<ModifiedExponentialTailProfile>();
            return y > 1.0 ? std::log(m.normalizer) - 2.0 * std::log(y) - m.alpha * y : neg_inf;
        }
        case ProfileKind::CompactSampled: {
            const double d = p.density(y);
            return d > 0.0 ? std::log(d) : neg_inf;
        }
        default:
            throw std::invalid_argument("log_density: unsupported kind");
    }
}

/// Brute-force exponential moment int e^{ty} y^k u0(y) dy by quadrature on a
/// window that the family's tail bound makes exhaustive.
inline double exp_moment_quadrature(const Profile& p, double t, int k) {
    double lo, hi;
    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto& g = p.as<GaussianProfile>();
            const double center = g.m + t / g.a;
            const double w = 14.0 / std::sqrt(g.a);
            lo = center - w;
            hi = center + w;
            break;
        }
        case ProfileKind::ExponentialTail: {
            const double rate = p.as<ExponentialTailProfile>().alpha - t;
            lo = 0.0;
            hi = (48.0 + 6.0 * std::log1p(1.0 / rate)) / rate;
            break;
        }
        case ProfileKind::ModifiedExponentialTail: {
            const double rate = p.as<ModifiedExponentialTailProfile>().alpha - t;
            lo = 1.0;
            hi = rate > 0.0 ? 1.0 + (48.0 + 6.0 * std::log1p(1.0 / rate)) / rate : 1e15;
            break;
        }
        case ProfileKind::CompactSampled: {
            const auto& c = p.as<CompactSampledProfile>();
            lo = c.support_lo;
            hi = c.support_hi;
            break;
        }
        default:
            throw std::invalid_argument("exp_moment_quadrature: unsupported kind");
    }
    auto yk = [k](double y) {
        double r = 1.0;
        for (int j = 0; j < k; ++j) r *= y;
        return r;
    };
    // The two exponential factors are fused in log space: computed separately
    // each can overflow or underflow long before their product does.
    return integrate(
        [&](double y) {
            const double le = t * y + log_density(p, y);
            return std::isfinite(le) ? yk(y) * std::exp(le) : 0.0;
        },
        lo, hi, {.rel_tol = 1e-12, .max_intervals = 40000});
}

/// Quadrature route for the solution formula, independent of the closed-form
/// dispatch in evaluate_u: numerator of the shifted form against the analytic
/// density, over a window padded far past the Gaussian factor's reach.
inline double evaluate_u_quadrature(const Profile& p, double t, double x) {
    const double m0 = exp_moment_quadrature(p, t, 0);
    double lo, hi;
    const double y_star = x - t * t;
    const double w = std::sqrt(190.0 * t);
    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto& g = p.as<GaussianProfile>();
            lo = std::min(y_star - w, g.m - 14.0 / std::sqrt(g.a));
            hi = std::max(y_star + w, g.m + 14.0 / std::sqrt(g.a));
            break;
        }
        case ProfileKind::ExponentialTail: {
            // Anchor the decay budget at the clamped peak: when the kernel
            // maximum sits left of the support, the boundary layer at 0 needs
            // (clamped distance)^2 extra room before 45 e-folds are reached.
            lo = 0.0;
            const double gap = std::max(lo - y_star, 0.0);
            hi = std::max(1.0, y_star + std::sqrt(gap * gap + 420.0 * t));
            break;
        }
        default:
            throw std::invalid_argument("evaluate_u_quadrature: unsupported kind");
    }
    // Factor the max of the log-integrand out so near-extinction values stay
    // representable.
    auto log_f = [&](double y) {
        const double d = x - t * t - y;
        return -d * d / (4.0 * t) + t * y + log_density(p, y);
    };
    double peak = log_f(std::clamp(y_star, lo, hi));
    for (double y = lo; y <= hi; y += (hi - lo) / 64.0) peak = std::max(peak, log_f(y));
    const double q = integrate(
        [&](double y) {
            const double lf = log_f(y);
            return std::isfinite(lf) ? std::exp(lf - peak) : 0.0;
        },
        lo, hi, {.rel_tol = 1e-12, .max_intervals = 40000});
    return std::exp(peak + std::log(q) - 0.5 * std::log(4.0 * std::numbers::pi * t) - std::log(m0));
}

/// C-infinity bump on [-1, 1], sampled and normalized; trapezoid sums over it
/// are spectrally accurate.
inline Profile smooth_bump(std::size_t n = 401) {
    GridFunction g = GridFunction::sample(-1.0, 1.0, n, [](double y) {
        const double r = 1.0 - y * y;
        return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
    });
    return normalize(Profile::compact_sampled(std::move(g)));
}

/// Uniform density on [-half_width, half_width].
inline Profile uniform_profile(double half_width = 1.0, std::size_t n = 2001) {
    const double value = 0.5 / half_width;
    GridFunction g = GridFunction::sample(-half_width, half_width, n,
                                          [value](double) { return value; });
    return Profile::compact_sampled(std::move(g));
}

/// Negative zeros of Ai (standard values), for predicting wave sign changes.
inline constexpr double kAiryZeros[12] = {
    -2.33810741045977, -4.08794944413097, -5.52055982809555, -6.78670809007176,
    -7.94413358712085, -9.02265085334098, -10.0401743415581, -11.0085243037332,
    -11.9360155632362, -12.8287767528658, -13.6914890352107, -14.5278299517753};

} // namespace rml::testing
