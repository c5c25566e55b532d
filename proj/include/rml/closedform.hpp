#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rml/errors.hpp"
#include "rml/grid.hpp"
#include "rml/profiles.hpp"
#include "rml/quadrature.hpp"
#include "rml/special.hpp"

namespace rml {

/// Snapshot of the solution at one time.
struct SolutionFrame {
    double t;
    GridFunction u;
    double u_bar; ///< mean fitness, first moment of u
    double mass;  ///< total mass
};

inline SolutionFrame make_frame(double t, GridFunction u) {
    const double mass = u.integral();
    const double u_bar = u.moment(1);
    return SolutionFrame{t, std::move(u), u_bar, mass};
}

enum class Existence { Alive, Extinct, NeverDefined };

struct SolveStatus {
    Existence status;
    double after; ///< extinction time when status == Extinct, NaN otherwise
    double T;     ///< lifespan of the formulas
};

inline SolveStatus solve_status(const Profile& p) {
    const TailClass tc = classify_tail(p);
    switch (tc.kind) {
        case TailKind::VeryLight:
            return {Existence::Alive, std::numeric_limits<double>::quiet_NaN(), tc.T};
        case TailKind::Light:
            return {Existence::Extinct, tc.T, tc.T};
        case TailKind::Heavy:
            return {Existence::NeverDefined, std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
    throw std::logic_error("solve_status: unreachable");
}

/// Gaussian data stays Gaussian: returns the propagated inverse variance and
/// mean, a(t) = a/(1+2at), m(t) = m + t^2 + t/a.
inline GaussianProfile gaussian_solution(double a, double m, double t) {
    if (!(a > 0.0)) throw std::invalid_argument("gaussian_solution: a > 0 required");
    return GaussianProfile{a / (1.0 + 2.0 * a * t), m + t * t + t / a};
}

/// log of the light-exponential-tail solution, valid for 0 < t < alpha:
///   u(t,x) = (alpha-t)/sqrt(2pi) e^{-(alpha-t)x} e^{-alpha t^2 + alpha^2 t}
///            Erf(-(x + t^2 - 2 alpha t)/sqrt(2t)).
inline double log_extinction_profile(double alpha, double t, double x) {
    if (!(alpha > 0.0) || !(t > 0.0) || !(t < alpha))
        throw DomainError("extinction_profile: requires 0 < t < alpha");
    const double theta = -(x + t * t - 2.0 * alpha * t) / std::sqrt(2.0 * t);
    return std::log(alpha - t) - 0.5 * std::log(2.0 * std::numbers::pi) - (alpha - t) * x -
           alpha * t * t + alpha * alpha * t + log_erf_upper(theta);
}

inline double extinction_profile(double alpha, double t, double x) {
    return std::exp(log_extinction_profile(alpha, t, x));
}

/// True exactly at the lifespan boundary t == T of a finite-lifespan profile.
/// The zero returned there by evaluate_u is the extension by continuity, not a
/// formula value; callers wanting the strict open-interval convention test
/// this flag.
inline bool at_lifespan_boundary(const Profile& p, double t) {
    const TailClass tc = classify_tail(p);
    return tc.kind == TailKind::Light && t == tc.T;
}

namespace detail {

/// log of the numerator integral of the solution formula in its shifted form,
///   N(t,x) = int e^{-(x - t^2 - y)^2/(4t)} e^{ty} u0(y) dy,
/// so that u = (4 pi t)^{-1/2} N / M0. All exponentials are combined in
/// log-space with a max-shift; the formulas are analytically balanced but
/// numerically explosive otherwise.
inline double log_numerator_shifted(const Profile& p, double t, double x) {
    switch (p.kind()) {
        case ProfileKind::CompactSampled: {
            const auto& g = p.as<CompactSampledProfile>().grid;
            std::vector<double> logs(g.size());
            std::vector<double> weights(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (g[i] <= 0.0) {
                    weights[i] = 0.0;
                    logs[i] = 0.0;
                    continue;
                }
                const double y = g.x(i);
                const double d = x - t * t - y;
                logs[i] = -d * d / (4.0 * t) + t * y + std::log(g[i]);
                weights[i] = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
            }
            return log_dot_exp(logs, weights) + std::log(g.dx());
        }
        case ProfileKind::ModifiedExponentialTail: {
            const auto& m = p.as<ModifiedExponentialTailProfile>();
            const double rate = m.alpha - t; // >= 0 within the lifespan
            // g(y) = -(x - t^2 - y)^2/(4t) - rate*y, concave quadratic.
            const double y_star = x - t * t - 2.0 * t * rate;
            const double w = std::sqrt(180.0 * t);
            const double lo = std::max(1.0, y_star - w);
            const double hi = y_star + std::sqrt((lo - y_star) * (lo - y_star) + 180.0 * t);
            auto g_of = [&](double y) {
                const double d = x - t * t - y;
                return -d * d / (4.0 * t) - rate * y;
            };
            const double g0 = g_of(std::clamp(y_star, lo, hi));
            const double q = integrate(
                [&](double y) { return std::exp(g_of(y) - g0) / (y * y); }, lo, hi,
                {.rel_tol = 1e-13});
            if (q <= 0.0) return -std::numeric_limits<double>::infinity();
            return std::log(m.normalizer) + g0 + std::log(q);
        }
        default:
            throw std::logic_error("log_numerator_shifted: closed-form family");
    }
}

} // namespace detail

/// log u(t, x); -infinity where the solution vanishes.
inline double log_evaluate_u(const Profile& p, double t, double x) {
    if (!(t >= 0.0)) throw std::invalid_argument("evaluate_u: t >= 0 required");
    const TailClass tc = classify_tail(p);
    if (tc.kind == TailKind::Heavy && t > 0.0)
        throw NeverDefinedError("evaluate_u: heavy-tailed data, solution defined for no t > 0");
    if (t > tc.T)
        throw OutOfLifespanError("evaluate_u: t past the lifespan T");
    if (t == 0.0) {
        const double d = p.density(x);
        return d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
    }

    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto& g = p.as<GaussianProfile>();
            const GaussianProfile s = gaussian_solution(g.a, g.m, t);
            const double d = x - s.m;
            return 0.5 * std::log(s.a / (2.0 * std::numbers::pi)) - 0.5 * s.a * d * d;
        }
        case ProfileKind::Dirac: {
            const double x0 = p.as<DiracProfile>().x0;
            return log_heat_kernel(t, x - t * t, x0);
        }
        case ProfileKind::ExponentialTail: {
            const double alpha = p.as<ExponentialTailProfile>().alpha;
            if (t == alpha) return -std::numeric_limits<double>::infinity(); // extension by zero
            return log_extinction_profile(alpha, t, x);
        }
        case ProfileKind::ModifiedExponentialTail:
        case ProfileKind::CompactSampled: {
            const double m0 = exp_moment(p, t, 0);
            if (std::isinf(m0)) return -std::numeric_limits<double>::infinity();
            return detail::log_numerator_shifted(p, t, x) -
                   0.5 * std::log(4.0 * std::numbers::pi * t) - std::log(m0);
        }
        case ProfileKind::AlgebraicTail:
            break; // unreachable, handled above
    }
    throw std::logic_error("log_evaluate_u: unreachable");
}

/// The solution u(t, x) of the replicator-mutator flow started from p.
///
/// Defined on [0, T); at t == T the extension by zero is returned together
/// with the at_lifespan_boundary flag when the formula itself diverges, while
/// families whose moment stays finite at T evaluate normally there.
inline double evaluate_u(const Profile& p, double t, double x) {
    return std::exp(log_evaluate_u(p, t, x));
}

/// Mean fitness u_bar(t) = t^2 + M1(t)/M0(t), the nonlocal term in closed form.
inline double mean_fitness(const Profile& p, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("mean_fitness: t >= 0 required");
    const TailClass tc = classify_tail(p);
    if (tc.kind == TailKind::Heavy)
        throw NeverDefinedError("mean_fitness: heavy-tailed data");
    if (t >= tc.T)
        throw OutOfLifespanError("mean_fitness: t past the lifespan T");
    const double m0 = exp_moment(p, t, 0);
    const double m1 = exp_moment(p, t, 1);
    return t * t + m1 / m0;
}

/// Adaptive evaluation grid: centered at the solution mean with width 12
/// standard deviations. The solution is a mixture over rho_t(y) ~ e^{ty}u0(y)
/// of heat kernels centered at t^2 + y, so mean = t^2 + E[y] and
/// variance = 2t + Var[y]; a fixed window would miss both the accelerating
/// bulk and the near-extinction spread.
inline GridFunction evaluation_window(const Profile& p, double t, std::size_t n = 4096) {
    const double m0 = exp_moment(p, t, 0);
    const double m1 = exp_moment(p, t, 1);
    const double m2 = exp_moment(p, t, 2);
    if (!std::isfinite(m0) || !std::isfinite(m1) || !std::isfinite(m2))
        throw OutOfLifespanError("evaluation_window: exponential moments diverge at this t");
    const double mu = m1 / m0;
    const double var = std::max(0.0, m2 / m0 - mu * mu);
    const double center = t * t + mu;
    const double sigma = std::sqrt(2.0 * t + var) + initial_spread(p);
    const double width = 12.0 * std::max(sigma, 1e-6);
    return GridFunction::zeros(center - width, center + width, n);
}

/// Solution sampled on the adaptive window, with measured mean and mass.
inline SolutionFrame solve_frame(const Profile& p, double t, std::size_t n = 4096) {
    GridFunction u = evaluation_window(p, t, n);
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = evaluate_u(p, t, u.x(i));
    return make_frame(t, std::move(u));
}

/// Uniform deviation from the elementary solution,
///   sup_x |u(t,x) - (4 pi t)^{-1/2} e^{-(x-t^2)^2/(4t)}|,
/// measured on the adaptive grid. Bounded by M/(t sqrt(2e)) for data
/// supported in [-M, M].
inline double deviation(const Profile& p, double t, std::size_t n = 4096) {
    if (p.kind() != ProfileKind::CompactSampled)
        throw NotCompactError("deviation: requires a CompactSampled profile");
    if (!(t >= 1.0)) throw std::invalid_argument("deviation: t >= 1 required");
    GridFunction grid = evaluation_window(p, t, n);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        const double diff = std::abs(evaluate_u(p, t, x) - heat_kernel(t, x, t * t));
        sup = std::max(sup, diff);
    }
    return sup;
}

} // namespace rml
