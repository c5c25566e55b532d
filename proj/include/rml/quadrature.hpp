#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "rml/errors.hpp"

namespace rml {

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_intervals = 20000;
    /// Partial sums past this magnitude are reported as +/-infinity instead of
    /// refining further (divergent improper integrals near a lifespan boundary).
    double huge_cap = 1e15;
};

namespace detail {

/// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (QUADPACK dqk15 constants).
inline constexpr double kGK15Nodes[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double kK15Weights[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double kG7Weights[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct PanelResult {
    double value;  // K15 estimate
    double error;  // QUADPACK-style error estimate
};

template <typename F>
PanelResult gk15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    const double fc = f(center);
    double resg = fc * kG7Weights[3];
    double resk = fc * kK15Weights[7];
    double sum_abs = std::abs(fc) * kK15Weights[7];

    double f_lo[7], f_hi[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = hlgth * kGK15Nodes[i];
        f_lo[i] = f(center - dx);
        f_hi[i] = f(center + dx);
        const double pair = f_lo[i] + f_hi[i];
        resk += kK15Weights[i] * pair;
        sum_abs += kK15Weights[i] * (std::abs(f_lo[i]) + std::abs(f_hi[i]));
        if (i % 2 == 1) resg += kG7Weights[i / 2] * pair;
    }

    const double reskh = resk * 0.5;
    double resasc = kK15Weights[7] * std::abs(fc - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kK15Weights[i] * (std::abs(f_lo[i] - reskh) + std::abs(f_hi[i] - reskh));

    const double habs = std::abs(hlgth);
    const double value = resk * hlgth;
    double err = std::abs((resk - resg) * hlgth);
    resasc *= habs;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps_floor = 5.0 * std::numeric_limits<double>::epsilon() * sum_abs * habs;
    err = std::max(err, eps_floor);
    return {value, err};
}

} // namespace detail

/// Adaptive Gauss-Kronrod quadrature on a finite interval: the segment with
/// the worst error estimate is bisected until the global estimate meets the
/// tolerance.
///
/// Callers integrating improper integrals truncate the domain themselves with
/// an analytic tail bound; every integrand in this library has one.
template <typename F>
double integrate(F&& f, double a, double b, QuadOptions opt = {}) {
    if (a == b) return 0.0;

    struct Seg {
        double a, b, value, error;
    };
    std::vector<Seg> segs;
    segs.reserve(128);
    auto first = detail::gk15(f, a, b);
    segs.push_back({a, b, first.value, first.error});

    while (true) {
        double total = 0.0, total_err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            total_err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (std::abs(total) > opt.huge_cap)
            return total > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
        if (total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)))
            return total;
        if (static_cast<int>(segs.size()) + 1 > opt.max_intervals)
            throw Error("integrate: adaptive quadrature did not converge");

        const Seg seg = segs[worst];
        const double mid = 0.5 * (seg.a + seg.b);
        if (mid <= std::min(seg.a, seg.b) || mid >= std::max(seg.a, seg.b))
            throw Error("integrate: interval too small to bisect further");
        auto left = detail::gk15(f, seg.a, mid);
        auto right = detail::gk15(f, mid, seg.b);
        segs[worst] = {seg.a, mid, left.value, left.error};
        segs.push_back({mid, seg.b, right.value, right.error});
    }
}

/// log(sum_i w_i * exp(l_i)) with max-shift; entries with w_i == 0 are skipped.
/// Returns -infinity for an empty or all-zero sum.
inline double log_dot_exp(std::span<const double> log_terms, std::span<const double> weights) {
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < log_terms.size(); ++i)
        if (weights[i] != 0.0 && log_terms[i] > lmax) lmax = log_terms[i];
    if (!std::isfinite(lmax)) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < log_terms.size(); ++i)
        if (weights[i] != 0.0) s += weights[i] * std::exp(log_terms[i] - lmax);
    if (s <= 0.0) return -std::numeric_limits<double>::infinity();
    return lmax + std::log(s);
}

/// Cumulative trapezoid over sample times; result[0] = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> times,
                                                std::span<const double> values) {
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    return out;
}

} // namespace rml
