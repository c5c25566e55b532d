#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "rml/errors.hpp"
#include "rml/grid.hpp"
#include "rml/quadrature.hpp"

namespace rml {

enum class ProfileKind {
    Gaussian,
    ExponentialTail,
    ModifiedExponentialTail,
    AlgebraicTail,
    Dirac,
    CompactSampled,
};

enum class TailKind { VeryLight, Light, Heavy };

/// Right-tail classification with the critical time
/// T = sup{ t >= 0 : int_0^inf e^{ty} u0(y) dy < inf }.
struct TailClass {
    TailKind kind;
    double T; // +inf for VeryLight, 0 for Heavy, in (0, inf) for Light
};

/// sqrt(a/2pi) e^{-a(x-m)^2/2}; a is the inverse variance.
struct GaussianProfile {
    double a;
    double m;
};

/// alpha e^{-alpha y} on (0, inf).
struct ExponentialTailProfile {
    double alpha;
};

/// normalizer * y^{-2} e^{-alpha y} on (1, inf).
struct ModifiedExponentialTailProfile {
    double alpha;
    double normalizer;
};

/// normalizer * y^{-p} on (1, inf), p > 1.
struct AlgebraicTailProfile {
    double p;
    double normalizer;
};

/// Point mass at x0. Kept as an analytic tag, never a grid spike: the
/// elementary solution exists in closed form set against it.
struct DiracProfile {
    double x0;
};

/// Sampled density, exactly zero outside [support_lo, support_hi].
struct CompactSampledProfile {
    GridFunction grid;
    double support_lo;
    double support_hi;
};

class Profile {
public:
    using Variant = std::variant<GaussianProfile, ExponentialTailProfile,
                                 ModifiedExponentialTailProfile, AlgebraicTailProfile,
                                 DiracProfile, CompactSampledProfile>;

    static Profile gaussian(double a, double m) {
        if (!(a > 0.0)) throw std::invalid_argument("gaussian: inverse variance a > 0 required");
        if (!std::isfinite(m)) throw std::invalid_argument("gaussian: mean must be finite");
        return Profile(GaussianProfile{a, m});
    }

    static Profile exponential_tail(double alpha) {
        if (!(alpha > 0.0)) throw std::invalid_argument("exponential_tail: alpha > 0 required");
        return Profile(ExponentialTailProfile{alpha});
    }

    /// Normalizer computed so the density integrates to 1 (adaptive quadrature
    /// of the tail integral; no elementary closed form for this family).
    static Profile modified_exponential_tail(double alpha) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("modified_exponential_tail: alpha > 0 required");
        const double hi = 1.0 + 45.0 / alpha;
        const double integral =
            integrate([alpha](double y) { return std::exp(-alpha * y) / (y * y); }, 1.0, hi);
        return Profile(ModifiedExponentialTailProfile{alpha, 1.0 / integral});
    }

    static Profile modified_exponential_tail(double alpha, double normalizer) {
        if (!(alpha > 0.0) || !(normalizer > 0.0))
            throw std::invalid_argument("modified_exponential_tail: bad parameters");
        return Profile(ModifiedExponentialTailProfile{alpha, normalizer});
    }

    static Profile algebraic_tail(double p) {
        if (!(p > 1.0)) throw std::invalid_argument("algebraic_tail: p > 1 required");
        return Profile(AlgebraicTailProfile{p, p - 1.0});
    }

    static Profile algebraic_tail(double p, double normalizer) {
        if (!(p > 1.0) || !(normalizer > 0.0))
            throw std::invalid_argument("algebraic_tail: bad parameters");
        return Profile(AlgebraicTailProfile{p, normalizer});
    }

    static Profile dirac(double x0) {
        if (!std::isfinite(x0)) throw std::invalid_argument("dirac: x0 must be finite");
        return Profile(DiracProfile{x0});
    }

    static Profile compact_sampled(GridFunction grid) {
        const double lo = grid.x_lo(), hi = grid.x_hi();
        return compact_sampled(std::move(grid), lo, hi);
    }

    static Profile compact_sampled(GridFunction grid, double support_lo, double support_hi) {
        if (!(support_lo < support_hi) || support_lo < grid.x_lo() - 1e-12 ||
            support_hi > grid.x_hi() + 1e-12)
            throw std::invalid_argument("compact_sampled: support must lie inside the grid");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < 0.0)
                throw std::invalid_argument("compact_sampled: values must be nonnegative");
            const double x = grid.x(i);
            if ((x < support_lo - 1e-12 || x > support_hi + 1e-12) && grid[i] != 0.0)
                throw std::invalid_argument("compact_sampled: values must vanish outside support");
        }
        return Profile(CompactSampledProfile{std::move(grid), support_lo, support_hi});
    }

    ProfileKind kind() const { return static_cast<ProfileKind>(data_.index()); }
    const Variant& data() const { return data_; }

    template <typename T>
    const T& as() const { return std::get<T>(data_); }

    /// Pointwise density u0(x). The Dirac tag has none.
    double density(double x) const {
        switch (kind()) {
            case ProfileKind::Gaussian: {
                const auto& g = as<GaussianProfile>();
                const double d = x - g.m;
                return std::sqrt(g.a / (2.0 * std::numbers::pi)) * std::exp(-0.5 * g.a * d * d);
            }
            case ProfileKind::ExponentialTail: {
                const auto& e = as<ExponentialTailProfile>();
                return x > 0.0 ? e.alpha * std::exp(-e.alpha * x) : 0.0;
            }
            case ProfileKind::ModifiedExponentialTail: {
                const auto& m = as<ModifiedExponentialTailProfile>();
                return x > 1.0 ? m.normalizer * std::exp(-m.alpha * x) / (x * x) : 0.0;
            }
            case ProfileKind::AlgebraicTail: {
                const auto& a = as<AlgebraicTailProfile>();
                return x > 1.0 ? a.normalizer * std::pow(x, -a.p) : 0.0;
            }
            case ProfileKind::Dirac:
                throw DomainError("density: a Dirac mass has no pointwise density");
            case ProfileKind::CompactSampled: {
                const auto& c = as<CompactSampledProfile>();
                if (x < c.support_lo || x > c.support_hi) return 0.0;
                return c.grid.interpolate(x);
            }
        }
        return 0.0;
    }

private:
    explicit Profile(Variant v) : data_(std::move(v)) {}
    Variant data_;
};

/// Measured total mass; 1 by convention for the Dirac tag.
inline double profile_mass(const Profile& p) {
    switch (p.kind()) {
        case ProfileKind::Gaussian:
        case ProfileKind::ExponentialTail:
        case ProfileKind::Dirac:
            return 1.0;
        case ProfileKind::ModifiedExponentialTail: {
            const auto& m = p.as<ModifiedExponentialTailProfile>();
            const double hi = 1.0 + 45.0 / m.alpha;
            return integrate(
                [&m](double y) { return m.normalizer * std::exp(-m.alpha * y) / (y * y); }, 1.0, hi);
        }
        case ProfileKind::AlgebraicTail: {
            const auto& a = p.as<AlgebraicTailProfile>();
            return a.normalizer / (a.p - 1.0);
        }
        case ProfileKind::CompactSampled:
            return p.as<CompactSampledProfile>().grid.integral();
    }
    return 0.0;
}

inline bool is_normalized(const Profile& p, double tol = 1e-8) {
    return std::abs(profile_mass(p) - 1.0) <= tol;
}

/// Rescales the density to unit mass. Analytic families come back exact.
inline Profile normalize(const Profile& p) {
    switch (p.kind()) {
        case ProfileKind::Gaussian:
        case ProfileKind::ExponentialTail:
        case ProfileKind::Dirac:
            return p;
        case ProfileKind::ModifiedExponentialTail: {
            const auto& m = p.as<ModifiedExponentialTailProfile>();
            return Profile::modified_exponential_tail(m.alpha);
        }
        case ProfileKind::AlgebraicTail: {
            const auto& a = p.as<AlgebraicTailProfile>();
            return Profile::algebraic_tail(a.p);
        }
        case ProfileKind::CompactSampled: {
            const auto& c = p.as<CompactSampledProfile>();
            const double mass = c.grid.integral();
            if (!std::isfinite(mass) || mass <= 0.0)
                throw NonIntegrableError("normalize: profile integral is zero or divergent");
            GridFunction g = c.grid;
            for (std::size_t i = 0; i < g.size(); ++i) g[i] /= mass;
            return Profile::compact_sampled(std::move(g), c.support_lo, c.support_hi);
        }
    }
    throw std::logic_error("normalize: unreachable");
}

/// Classification of the right tail.
///   VeryLight: T = inf (global solution), Light: 0 < T < inf (finite-time
///   extinction), Heavy: T = 0 (defined for no positive time).
inline TailClass classify_tail(const Profile& p) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (p.kind()) {
        case ProfileKind::Gaussian:
        case ProfileKind::Dirac:
        case ProfileKind::CompactSampled:
            // Compact support / Gaussian decay: every exponential moment is finite.
            return {TailKind::VeryLight, inf};
        case ProfileKind::ExponentialTail:
            return {TailKind::Light, p.as<ExponentialTailProfile>().alpha};
        case ProfileKind::ModifiedExponentialTail:
            return {TailKind::Light, p.as<ModifiedExponentialTailProfile>().alpha};
        case ProfileKind::AlgebraicTail:
            return {TailKind::Heavy, 0.0};
    }
    throw std::logic_error("classify_tail: unreachable");
}

namespace detail {

inline double pow_int(double y, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= y;
    return r;
}

/// int_1^inf y^{k-2} e^{-rate*y} dy by adaptive quadrature, rate > 0 or
/// (rate == 0 and k == 0). Truncation from the exponential (or algebraic) tail
/// bound at 1e-15 of the accumulated value.
inline double modified_tail_integral(double rate, int k) {
    if (rate <= 0.0) {
        if (k != 0) return std::numeric_limits<double>::infinity();
        return 1.0; // int_1^inf y^-2 dy
    }
    double hi;
    if (k == 0)
        hi = std::min(1e15, std::max(2.0, 45.0 / rate)); // y^-2 alone already integrable
    else
        hi = 1.0 + (45.0 + 3.0 * std::log1p(1.0 / rate)) / rate;
    return integrate([rate, k](double y) { return pow_int(y, k) * std::exp(-rate * y) / (y * y); },
                     1.0, hi, {.rel_tol = 1e-13, .max_intervals = 40000});
}

} // namespace detail

/// Exponential moment int e^{ty} y^k u0(y) dy for k in {0, 1, 2}.
/// Divergence is reported as +infinity, not as an error.
inline double exp_moment(const Profile& p, double t, int k) {
    if (k < 0 || k > 2) throw std::invalid_argument("exp_moment: k in {0, 1, 2} required");
    if (!(t >= 0.0)) throw std::invalid_argument("exp_moment: t >= 0 required");
    constexpr double inf = std::numeric_limits<double>::infinity();

    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto& g = p.as<GaussianProfile>();
            const double m0 = std::exp(g.m * t + t * t / (2.0 * g.a));
            const double mean_t = g.m + t / g.a;
            if (k == 0) return m0;
            if (k == 1) return mean_t * m0;
            return (mean_t * mean_t + 1.0 / g.a) * m0;
        }
        case ProfileKind::ExponentialTail: {
            const double alpha = p.as<ExponentialTailProfile>().alpha;
            if (t >= alpha) return inf;
            const double d = alpha - t;
            if (k == 0) return alpha / d;
            if (k == 1) return alpha / (d * d);
            return 2.0 * alpha / (d * d * d);
        }
        case ProfileKind::ModifiedExponentialTail: {
            const auto& m = p.as<ModifiedExponentialTailProfile>();
            if (t > m.alpha) return inf;
            return m.normalizer * detail::modified_tail_integral(m.alpha - t, k);
        }
        case ProfileKind::AlgebraicTail: {
            const auto& a = p.as<AlgebraicTailProfile>();
            if (t > 0.0) return inf;
            if (a.p - k <= 1.0) return inf;
            return a.normalizer / (a.p - k - 1.0);
        }
        case ProfileKind::Dirac: {
            const double x0 = p.as<DiracProfile>().x0;
            return detail::pow_int(x0, k) * std::exp(t * x0);
        }
        case ProfileKind::CompactSampled: {
            const auto& c = p.as<CompactSampledProfile>();
            const auto& g = c.grid;
            double s = 0.5 * (detail::pow_int(g.x_lo(), k) * std::exp(t * g.x_lo()) * g[0] +
                              detail::pow_int(g.x_hi(), k) * std::exp(t * g.x_hi()) * g[g.size() - 1]);
            for (std::size_t i = 1; i + 1 < g.size(); ++i)
                s += detail::pow_int(g.x(i), k) * std::exp(t * g.x(i)) * g[i];
            return s * g.dx();
        }
    }
    throw std::logic_error("exp_moment: unreachable");
}

/// Length scale of the initial density, used to size evaluation windows.
inline double initial_spread(const Profile& p) {
    switch (p.kind()) {
        case ProfileKind::Gaussian:
            return 1.0 / std::sqrt(p.as<GaussianProfile>().a);
        case ProfileKind::ExponentialTail:
            return 1.0 / p.as<ExponentialTailProfile>().alpha;
        case ProfileKind::ModifiedExponentialTail:
            return 1.0 + 1.0 / p.as<ModifiedExponentialTailProfile>().alpha;
        case ProfileKind::AlgebraicTail:
            return 1.0;
        case ProfileKind::Dirac:
            return 0.0;
        case ProfileKind::CompactSampled: {
            const auto& c = p.as<CompactSampledProfile>();
            return 0.5 * (c.support_hi - c.support_lo);
        }
    }
    return 1.0;
}

} // namespace rml
