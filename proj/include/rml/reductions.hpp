#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rml/closedform.hpp"
#include "rml/errors.hpp"
#include "rml/grid.hpp"
#include "rml/profiles.hpp"
#include "rml/quadrature.hpp"
#include "rml/special.hpp"

namespace rml {

/// Time-only coefficient a(t) with its cumulative integrals:
/// A(t) = int_0^t a, A2(t) = int_0^t A(s) ds (the iterated integral entering
/// the generalized gauge-and-shift identity).
class TimeFactor {
public:
    explicit TimeFactor(std::function<double(double)> a) : a_(std::move(a)) {}

    double a(double t) const { return a_(t); }
    double A(double t) const { return integrate(a_, 0.0, t, {.rel_tol = 1e-13}); }
    double A2(double t) const {
        return integrate([this](double s) { return A(s); }, 0.0, t, {.rel_tol = 1e-11});
    }
    /// int_0^t A(s)^2 ds, the scalar phase of the generalized shift.
    double A_squared_integral(double t) const {
        return integrate([this](double s) { const double v = A(s); return v * v; }, 0.0, t,
                         {.rel_tol = 1e-11});
    }

private:
    std::function<double(double)> a_;
};

/// External time-dependent factor: multiplies the field by e^{int_0^t a}.
inline GridFunction gauge_external(const GridFunction& v,
                                   const std::function<double(double)>& a, double t) {
    const double factor = std::exp(integrate(a, 0.0, t, {.rel_tol = 1e-13}));
    GridFunction out = v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
    return out;
}

inline SolutionFrame gauge_external(const SolutionFrame& v,
                                    const std::function<double(double)>& a) {
    return make_frame(v.t, gauge_external(v.u, a, v.t));
}

struct MomentumResult {
    std::vector<SolutionFrame> frames;
    /// 1 + int_0^{t_j} vbar(s) ds at each frame time (trapezoid).
    std::vector<double> denominators;
};

/// Inverts the momentum-factor change of unknown: given frames of v solving
/// the equation without the nonlocal term, returns
///   u(t, x) = v(t, x) / (1 + int_0^t vbar(s) ds),   vbar(s) = int f(x) v(s,x) dx.
///
/// If the v frames carry an external gauge e^{int_0^t a} on top (gauge != null),
/// the inversion strips it consistently:
///   u = v e^{-A(t)} / (1 + int_0^t e^{-A(s)} vbar(s) ds),
/// which makes the composition independent of the gauge.
///
/// Throws BlowUpError with the bracketing frame interval when the denominator
/// crosses zero.
inline MomentumResult momentum_invert(std::span<const SolutionFrame> v_frames,
                                      const std::function<double(double)>& weight,
                                      const std::function<double(double)>* gauge = nullptr) {
    if (v_frames.size() < 2)
        throw std::invalid_argument("momentum_invert: need at least two frames");
    const std::size_t n = v_frames.size();

    std::vector<double> times(n), vbar(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& f = v_frames[j];
        times[j] = f.t;
        if (j > 0 && !(times[j] > times[j - 1]))
            throw std::invalid_argument("momentum_invert: frame times must increase");
        const auto& g = f.u;
        double s = 0.5 * (weight(g.x_lo()) * g[0] + weight(g.x_hi()) * g[g.size() - 1]);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) s += weight(g.x(i)) * g[i];
        vbar[j] = s * g.dx();
        if (gauge)
            vbar[j] *= std::exp(-integrate(*gauge, 0.0, f.t, {.rel_tol = 1e-13}));
    }

    const std::vector<double> cum = cumulative_trapezoid(times, vbar);
    MomentumResult out;
    out.frames.reserve(n);
    out.denominators.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double denom = 1.0 + cum[j];
        if (denom <= 0.0) {
            const double lo = times[j - 1], hi = times[j];
            const double d0 = 1.0 + cum[j - 1];
            const double est = lo + (hi - lo) * d0 / (d0 - denom);
            throw BlowUpError(lo, hi, est);
        }
        GridFunction u = v_frames[j].u;
        double scale = 1.0 / denom;
        if (gauge)
            scale *= std::exp(-integrate(*gauge, 0.0, times[j], {.rel_tol = 1e-13}));
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= scale;
        out.frames.push_back(make_frame(times[j], std::move(u)));
        out.denominators.push_back(denom);
    }
    return out;
}

using HeatEvaluator = std::function<double(double, double)>;

/// w(s, x) = e^{s d_xx} u0(x), the plain heat evolution of the profile.
/// Closed forms for the Gaussian, Dirac and exponential families; quadrature
/// against the kernel otherwise. s == 0 returns the density itself.
inline HeatEvaluator heat_of_profile(const Profile& p) {
    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto g = p.as<GaussianProfile>();
            return [g](double s, double x) {
                const double a_s = g.a / (1.0 + 2.0 * g.a * s);
                const double d = x - g.m;
                return std::sqrt(a_s / (2.0 * std::numbers::pi)) * std::exp(-0.5 * a_s * d * d);
            };
        }
        case ProfileKind::Dirac: {
            const double x0 = p.as<DiracProfile>().x0;
            return [x0](double s, double x) {
                if (s == 0.0)
                    throw DomainError("heat_of_profile: Dirac data needs s > 0");
                return heat_kernel(s, x, x0);
            };
        }
        case ProfileKind::ExponentialTail: {
            const double alpha = p.as<ExponentialTailProfile>().alpha;
            return [alpha](double s, double x) {
                if (s == 0.0) return x > 0.0 ? alpha * std::exp(-alpha * x) : 0.0;
                const double log_w = std::log(alpha) - alpha * (x - alpha * s) -
                                     0.5 * std::log(2.0 * std::numbers::pi) +
                                     log_erf_upper(-(x - 2.0 * alpha * s) / std::sqrt(2.0 * s));
                return std::exp(log_w);
            };
        }
        case ProfileKind::CompactSampled: {
            const auto c = p.as<CompactSampledProfile>();
            return [c](double s, double x) {
                if (s == 0.0) return Profile::compact_sampled(c.grid, c.support_lo, c.support_hi)
                                  .density(x);
                const auto& g = c.grid;
                double acc = 0.5 * (heat_kernel(s, x, g.x_lo()) * g[0] +
                                    heat_kernel(s, x, g.x_hi()) * g[g.size() - 1]);
                for (std::size_t i = 1; i + 1 < g.size(); ++i)
                    acc += heat_kernel(s, x, g.x(i)) * g[i];
                return acc * g.dx();
            };
        }
        default: {
            const Profile copy = p;
            return [copy](double s, double x) {
                if (s == 0.0) return copy.density(x);
                const double w = std::sqrt(180.0 * s);
                const double lo = std::max(1.0, x - w);
                const double hi = std::max(lo + w, x + w);
                return integrate(
                    [&](double y) { return heat_kernel(s, x, y) * copy.density(y); }, lo, hi,
                    {.rel_tol = 1e-12, .abs_tol = 1e-300});
            };
        }
    }
}

/// Gauge-and-shift identity for the unit linear coefficient:
///   v(t, x) = w(t, x + t^2) e^{tx + t^3/3},
/// evaluated in log-space so the balanced growth never overflows on its own.
inline double avron_herbst(const HeatEvaluator& w, double t, double x) {
    if (!(t >= 0.0)) throw std::invalid_argument("avron_herbst: t >= 0 required");
    const double w_val = w(t, x + t * t);
    if (w_val <= 0.0) return 0.0;
    const double log_v = std::log(w_val) + t * x + t * t * t / 3.0;
    if (log_v > 700.0)
        throw OverflowError("avron_herbst: result exceeds representable range");
    return std::exp(log_v);
}

/// Generalized form for a time-dependent linear coefficient a(t):
///   v(t, x) = w(t, x + 2 A2(t)) exp(x A(t) + int_0^t A(s)^2 ds).
inline double avron_herbst(const HeatEvaluator& w, const TimeFactor& af, double t, double x) {
    if (!(t >= 0.0)) throw std::invalid_argument("avron_herbst: t >= 0 required");
    const double w_val = w(t, x + 2.0 * af.A2(t));
    if (w_val <= 0.0) return 0.0;
    const double log_v = std::log(w_val) + x * af.A(t) + af.A_squared_integral(t);
    if (log_v > 700.0)
        throw OverflowError("avron_herbst: result exceeds representable range");
    return std::exp(log_v);
}

/// Fundamental oscillator pair of mu'' = a(t) mu, nu'' = a(t) nu with
/// mu(0) = 0, mu'(0) = 1, nu(0) = 1, nu'(0) = 0, tabulated on a uniform grid.
/// Off-node queries use cubic Hermite interpolation (values + derivatives),
/// matching the integrator's fourth order.
class FundamentalPair {
public:
    FundamentalPair(std::function<double(double)> a, std::vector<double> t, std::vector<double> mu,
                    std::vector<double> mu_dot, std::vector<double> nu, std::vector<double> nu_dot)
        : a_(std::move(a)), t_(std::move(t)), mu_(std::move(mu)), mu_dot_(std::move(mu_dot)),
          nu_(std::move(nu)), nu_dot_(std::move(nu_dot)) {}

    double t_max() const { return t_.back(); }
    std::size_t size() const { return t_.size(); }
    std::span<const double> times() const { return t_; }
    std::span<const double> mu_values() const { return mu_; }
    std::span<const double> mu_dot_values() const { return mu_dot_; }
    std::span<const double> nu_values() const { return nu_; }
    std::span<const double> nu_dot_values() const { return nu_dot_; }

    double mu(double t) const { return eval(mu_, mu_dot_, t); }
    double nu(double t) const { return eval(nu_, nu_dot_, t); }
    double mu_dot(double t) const { return eval_dot(mu_, mu_dot_, t); }
    double nu_dot(double t) const { return eval_dot(nu_, nu_dot_, t); }

private:
    std::size_t locate(double t) const {
        if (!(t >= t_.front() && t <= t_.back()))
            throw DomainError("FundamentalPair: t outside the tabulated grid");
        const double h = t_[1] - t_[0];
        const auto i = static_cast<std::size_t>(
            std::min((t - t_.front()) / h, static_cast<double>(t_.size() - 2)));
        return i;
    }

    double eval(const std::vector<double>& y, const std::vector<double>& yd, double t) const {
        const std::size_t i = locate(t);
        const double h = t_[i + 1] - t_[i];
        const double s = (t - t_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y[i] + (s3 - 2 * s2 + s) * h * yd[i] +
               (-2 * s3 + 3 * s2) * y[i + 1] + (s3 - s2) * h * yd[i + 1];
    }

    // Hermite on the derivative, using y'' = a(t) y for the slopes.
    double eval_dot(const std::vector<double>& y, const std::vector<double>& yd, double t) const {
        const std::size_t i = locate(t);
        const double h = t_[i + 1] - t_[i];
        const double s = (t - t_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double dd0 = a_(t_[i]) * y[i];
        const double dd1 = a_(t_[i + 1]) * y[i + 1];
        return (2 * s3 - 3 * s2 + 1) * yd[i] + (s3 - 2 * s2 + s) * h * dd0 +
               (-2 * s3 + 3 * s2) * yd[i + 1] + (s3 - s2) * h * dd1;
    }

    std::function<double(double)> a_;
    std::vector<double> t_, mu_, mu_dot_, nu_, nu_dot_;
};

/// Integrates the oscillator pair with the classical 4-stage one-step scheme
/// at fixed dt. The Wronskian mu' nu - mu nu' = 1 is conserved by the flow;
/// drift beyond 1e-6 aborts with StepTooLargeError.
inline FundamentalPair fundamental_pair(const std::function<double(double)>& a, double t_max,
                                        double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("fundamental_pair: t_max > 0 and dt > 0 required");
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-12));
    const double h = t_max / static_cast<double>(n_steps);

    std::vector<double> ts(n_steps + 1), mu(n_steps + 1), mud(n_steps + 1), nu(n_steps + 1),
        nud(n_steps + 1);
    ts[0] = 0.0;
    mu[0] = 0.0;
    mud[0] = 1.0;
    nu[0] = 1.0;
    nud[0] = 0.0;

    struct State {
        double y, yd;
    };
    auto rk4 = [&a, h](double t, State s) {
        auto f = [&a](double tt, State q) { return State{q.yd, a(tt) * q.y}; };
        const State k1 = f(t, s);
        const State k2 = f(t + 0.5 * h, {s.y + 0.5 * h * k1.y, s.yd + 0.5 * h * k1.yd});
        const State k3 = f(t + 0.5 * h, {s.y + 0.5 * h * k2.y, s.yd + 0.5 * h * k2.yd});
        const State k4 = f(t + h, {s.y + h * k3.y, s.yd + h * k3.yd});
        return State{s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
                     s.yd + h / 6.0 * (k1.yd + 2 * k2.yd + 2 * k3.yd + k4.yd)};
    };

    State sm{0.0, 1.0}, sn{1.0, 0.0};
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = ts[i];
        sm = rk4(t, sm);
        sn = rk4(t, sn);
        ts[i + 1] = t + h;
        mu[i + 1] = sm.y;
        mud[i + 1] = sm.yd;
        nu[i + 1] = sn.y;
        nud[i + 1] = sn.yd;
        const double wronskian = sm.yd * sn.y - sm.y * sn.yd;
        if (std::abs(wronskian - 1.0) > 1e-6)
            throw StepTooLargeError("fundamental_pair: Wronskian drift exceeds 1e-6, reduce dt");
    }
    ts.back() = t_max;
    return FundamentalPair(a, std::move(ts), std::move(mu), std::move(mud), std::move(nu),
                           std::move(nud));
}

/// Lens transform: maps a heat solution w to the solution of the flow with a
/// quadratic coefficient,
///   v(t, x) = nu(2t)^{-1/2} e^{-(x^2/2) nu'(2t)/nu(2t)} w(mu(2t)/(2 nu(2t)), x/nu(2t)).
inline double lens_transform(const HeatEvaluator& w, const FundamentalPair& pair, double t,
                             double x) {
    if (!(t >= 0.0)) throw std::invalid_argument("lens_transform: t >= 0 required");
    if (2.0 * t > pair.t_max())
        throw DomainError("lens_transform: 2t exceeds the tabulated grid");
    const double nu = pair.nu(2.0 * t);
    if (!(nu > 0.0)) throw DomainError("lens_transform: nu(2t) must be positive");
    const double nu_dot = pair.nu_dot(2.0 * t);
    const double s_heat = pair.mu(2.0 * t) / (2.0 * nu);
    const double w_val = w(s_heat, x / nu);
    return std::exp(-0.5 * x * x * nu_dot / nu) / std::sqrt(nu) * w_val;
}

enum class MehlerCrossSign { Plus, Minus };

/// Propagator solution of the constant quadratic flow v_t = v_xx - x^2 v:
///   v(t,x) = (2 pi sinh 2t)^{-1/2} int e^{-coth(2t)(x^2+y^2)/2 +- cosech(2t) x y} u0(y) dy.
///
/// The cross-term sign is ambiguous between sources; the Plus variant is the
/// one consistent with lens_transform composed with the heat kernel (see
/// resolve_mehler_cross_sign, which runs that comparison). Both variants stay
/// available rather than silently assuming one.
inline double mehler_solution(const Profile& p, double t, double x,
                              MehlerCrossSign sign = MehlerCrossSign::Plus) {
    if (!(t > 0.0)) throw std::invalid_argument("mehler_solution: t > 0 required");
    const double sh = std::sinh(2.0 * t);
    const double coth = std::cosh(2.0 * t) / sh;
    const double csch = (sign == MehlerCrossSign::Plus ? 1.0 : -1.0) / sh;
    const double prefactor = 1.0 / std::sqrt(2.0 * std::numbers::pi * sh);
    auto kernel_exp = [&](double y) { return -0.5 * coth * (x * x + y * y) + csch * x * y; };

    switch (p.kind()) {
        case ProfileKind::Dirac:
            return prefactor * std::exp(kernel_exp(p.as<DiracProfile>().x0));
        case ProfileKind::CompactSampled: {
            const auto& g = p.as<CompactSampledProfile>().grid;
            double acc = 0.5 * (std::exp(kernel_exp(g.x_lo())) * g[0] +
                                std::exp(kernel_exp(g.x_hi())) * g[g.size() - 1]);
            for (std::size_t i = 1; i + 1 < g.size(); ++i)
                acc += std::exp(kernel_exp(g.x(i))) * g[i];
            return prefactor * acc * g.dx();
        }
        default: {
            // The kernel exponent is a concave quadratic in y peaking at
            // y* = x csch/coth with curvature coth >= 1: 45 e-folds of decay
            // are reached within sqrt(90/coth), so integrating that window
            // alone truncates the tail below 1e-19 of the bounded density.
            const double y_star = x * csch / coth;
            const double width = std::sqrt(90.0 / coth) + 1e-3;
            return prefactor *
                   integrate([&](double y) { return std::exp(kernel_exp(y)) * p.density(y); },
                             y_star - width, y_star + width,
                             {.rel_tol = 1e-12, .abs_tol = 1e-300});
        }
    }
}

/// Runs the documented disambiguation protocol: an off-center Gaussian is
/// propagated both ways through the Mehler kernel and through
/// lens_transform(heat) with unit coefficient; the matching sign wins.
inline MehlerCrossSign resolve_mehler_cross_sign() {
    const Profile p = Profile::gaussian(1.0, 0.7);
    const HeatEvaluator w = heat_of_profile(p);
    const FundamentalPair pair =
        fundamental_pair([](double) { return 1.0; }, 2.0, 1e-4);
    double worst_plus = 0.0, worst_minus = 0.0;
    for (double t : {0.25, 0.6}) {
        for (double x : {-1.3, 0.4, 1.8}) {
            const double ref = lens_transform(w, pair, t, x);
            worst_plus = std::max(worst_plus,
                                  std::abs(mehler_solution(p, t, x, MehlerCrossSign::Plus) - ref));
            worst_minus = std::max(
                worst_minus, std::abs(mehler_solution(p, t, x, MehlerCrossSign::Minus) - ref));
        }
    }
    if (worst_plus < 1e-8 && worst_minus > 1e-8) return MehlerCrossSign::Plus;
    if (worst_minus < 1e-8 && worst_plus > 1e-8) return MehlerCrossSign::Minus;
    throw Error("resolve_mehler_cross_sign: protocol did not single out a sign");
}

/// Gaussian state of the quadratic-weight auxiliary flow v_t = v_xx - x^2 v
/// started from sqrt(a/2pi) e^{-a(x-m)^2/2}:
///   a(t) = (a cosh 2t + sinh 2t)/(cosh 2t + a sinh 2t),
///   m(t) = a m/(a cosh 2t + sinh 2t),
/// together with the amplitude and second moment of v.
struct QuadGaussianState {
    double a_t;
    double m_t;
    double log_amplitude;  ///< log of the peak prefactor of v(t, .)
    double second_moment;  ///< int x^2 v(t, x) dx
};

inline QuadGaussianState quad_weight_v_state(double a, double m, double t) {
    if (!(a > 0.0)) throw std::invalid_argument("quad_weight_v_state: a > 0 required");
    const double C = std::cosh(2.0 * t), S = std::sinh(2.0 * t);
    const double a_t = (a * C + S) / (C + a * S);
    const double m_t = a * m / (a * C + S);
    const double log_amp = 0.5 * std::log(a / (2.0 * std::numbers::pi * (C + a * S))) -
                           a * m * m * S / (2.0 * (a * C + S));
    const double second =
        std::sqrt(a) * std::exp(-a * m * m * S / (2.0 * (a * C + S))) *
        ((C + a * S) * (a * C + S) + a * a * m * m) / std::pow(a * C + S, 2.5);
    return {a_t, m_t, log_amp, second};
}

/// Pointwise value of the auxiliary Gaussian v(t, x).
inline double quad_weight_v(double a, double m, double t, double x) {
    const QuadGaussianState s = quad_weight_v_state(a, m, t);
    const double d = x - s.m_t;
    return std::exp(s.log_amplitude - 0.5 * s.a_t * d * d);
}

/// Solution frame of the quadratic-weight flow u_t = u_xx - (x^2 - int x^2 u) u
/// with Gaussian data. The auxiliary Gaussian frames are inverted through the
/// momentum factor with weight -x^2 (the nonlocal term enters with that sign),
/// reproducing u = v / (1 - int_0^t int x^2 v dx ds) with the time integral
/// done numerically on refined frame grids.
inline SolutionFrame quad_weight_solution(double a, double m, double t, std::size_t n_x = 4096) {
    if (!(a > 0.0)) throw std::invalid_argument("quad_weight_solution: a > 0 required");
    if (!(t >= 0.0)) throw std::invalid_argument("quad_weight_solution: t >= 0 required");

    // Window wide enough for every intermediate Gaussian on [0, t].
    double sigma_max = 1.0 / std::sqrt(a);
    double center_lo = m, center_hi = m;
    for (int j = 0; j <= 32; ++j) {
        const QuadGaussianState s = quad_weight_v_state(a, m, t * j / 32.0);
        sigma_max = std::max(sigma_max, 1.0 / std::sqrt(s.a_t));
        center_lo = std::min(center_lo, s.m_t);
        center_hi = std::max(center_hi, s.m_t);
    }
    const double lo = center_lo - 13.0 * sigma_max;
    const double hi = center_hi + 13.0 * sigma_max;

    if (t == 0.0) {
        GridFunction u = GridFunction::sample(lo, hi, n_x, [&](double x) {
            return quad_weight_v(a, m, 0.0, x);
        });
        return make_frame(0.0, std::move(u));
    }

    auto weight = [](double x) { return -x * x; };
    std::size_t n_t = 256;
    double prev_denom = std::numeric_limits<double>::quiet_NaN();
    MomentumResult result;
    while (true) {
        std::vector<SolutionFrame> v_frames;
        v_frames.reserve(n_t + 1);
        for (std::size_t j = 0; j <= n_t; ++j) {
            const double s = t * static_cast<double>(j) / static_cast<double>(n_t);
            GridFunction g = GridFunction::sample(
                lo, hi, n_x, [&](double x) { return quad_weight_v(a, m, s, x); });
            v_frames.push_back(make_frame(s, std::move(g)));
        }
        result = momentum_invert(v_frames, weight);
        const double denom = result.denominators.back();
        if (!std::isnan(prev_denom) && std::abs(denom - prev_denom) <= 1e-9 * std::abs(denom))
            break;
        if (n_t >= 16384)
            break; // refinement saturated; trapezoid error already ~1e-10 here
        prev_denom = denom;
        n_t *= 2;
    }
    return result.frames.back();
}

struct TransformRouteOptions {
    double x_lo = 0.0;
    double x_hi = 0.0;   ///< window; auto-sized when x_lo == x_hi
    std::size_t n_x = 1024;
    double refine_tol = 1e-8;
    std::size_t max_time_nodes = 8192;
};

/// The solution reconstructed through the transform chain
/// momentum_invert(avron_herbst(heat flow), f(x) = x) -- the derivation of the
/// explicit solution formula, exercised numerically. Returns the frame at time t.
///
/// The time quadrature refines by doubling (reusing the even nodes) with one
/// Richardson extrapolation of the trapezoid normalization, and stops once the
/// extrapolated value moves less than refine_tol; the returned frame is
/// rescaled to the extrapolated normalization.
inline SolutionFrame transform_route_frame(const Profile& p, double t,
                                           TransformRouteOptions opt = {}) {
    if (!(t > 0.0)) throw std::invalid_argument("transform_route_frame: t > 0 required");
    const HeatEvaluator w = heat_of_profile(p);

    double lo = opt.x_lo, hi = opt.x_hi;
    if (lo == hi) {
        // The gauged field e^{sx} w(s, x+s^2) is a mixture over
        // rho_s(y) ~ e^{sy} u0(y) of Gaussians centered at x = y + s^2 with
        // width sqrt(2s); cover the y-bulk for s in {0, t} plus 12 sigma.
        double y_lo, y_hi;
        if (p.kind() == ProfileKind::CompactSampled) {
            const auto& c = p.as<CompactSampledProfile>();
            y_lo = c.support_lo;
            y_hi = c.support_hi;
        } else {
            const double mu0 = exp_moment(p, 0.0, 1);
            const double m0t = exp_moment(p, t, 0);
            const double mut = exp_moment(p, t, 1) / m0t;
            const double vart = std::max(0.0, exp_moment(p, t, 2) / m0t - mut * mut);
            const double sd = std::sqrt(vart) + initial_spread(p);
            y_lo = std::min(mu0, mut) - 12.0 * sd;
            y_hi = std::max(mu0, mut) + 12.0 * sd;
        }
        lo = y_lo - 12.0 * std::sqrt(2.0 * t) - 1.0;
        hi = y_hi + t * t + 12.0 * std::sqrt(2.0 * t) + 1.0;
    }

    auto gauged_field = [&](double s, double x) {
        if (s == 0.0) return w(0.0, x);
        return avron_herbst(w, s, x);
    };

    auto weight = [](double x) { return x; };
    std::size_t n_t = 64;
    // Frames are cached across refinement levels: doubling reuses the even nodes.
    std::vector<SolutionFrame> frames;
    auto frame_at = [&](double s) {
        GridFunction g = GridFunction::sample(lo, hi, opt.n_x,
                                              [&](double x) { return gauged_field(s, x); });
        return make_frame(s, std::move(g));
    };
    for (std::size_t j = 0; j <= n_t; ++j)
        frames.push_back(frame_at(t * static_cast<double>(j) / static_cast<double>(n_t)));

    MomentumResult result = momentum_invert(frames, weight);
    double denom_coarse = result.denominators.back();
    double extrapolated_prev = std::numeric_limits<double>::quiet_NaN();
    while (n_t < opt.max_time_nodes) {
        n_t *= 2;
        std::vector<SolutionFrame> finer;
        finer.reserve(n_t + 1);
        for (std::size_t j = 0; j <= n_t; ++j) {
            if (j % 2 == 0)
                finer.push_back(frames[j / 2]);
            else
                finer.push_back(frame_at(t * static_cast<double>(j) / static_cast<double>(n_t)));
        }
        frames = std::move(finer);
        result = momentum_invert(frames, weight);
        const double denom = result.denominators.back();
        const double extrapolated = denom + (denom - denom_coarse) / 3.0;
        if (!std::isnan(extrapolated_prev) &&
            std::abs(extrapolated - extrapolated_prev) <= opt.refine_tol * std::abs(extrapolated)) {
            SolutionFrame out = result.frames.back();
            const double rescale = denom / extrapolated;
            for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] *= rescale;
            return make_frame(out.t, std::move(out.u));
        }
        extrapolated_prev = extrapolated;
        denom_coarse = denom;
    }
    return result.frames.back();
}

} // namespace rml
