#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "rml/reductions.hpp"
#include "support/oracles.hpp"

using namespace rml;
using rml::testing::smooth_bump;

namespace {

std::vector<SolutionFrame> heat_frames(const Profile& p, double t_end, std::size_t n_t,
                                       double x_lo, double x_hi, std::size_t n_x) {
    const HeatEvaluator w = heat_of_profile(p);
    std::vector<SolutionFrame> frames;
    frames.reserve(n_t + 1);
    for (std::size_t j = 0; j <= n_t; ++j) {
        const double s = t_end * static_cast<double>(j) / static_cast<double>(n_t);
        frames.push_back(
            make_frame(s, GridFunction::sample(x_lo, x_hi, n_x, [&](double x) { return w(s, x); })));
    }
    return frames;
}

} // namespace

TEST_SUITE("reductions") {

TEST_CASE("time factor integrals") {
    const TimeFactor unit([](double) { return 1.0; });
    CHECK(unit.A(0.0) == 0.0);
    CHECK(unit.A2(0.0) == 0.0);
    CHECK(unit.A(2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(unit.A2(2.0) == doctest::Approx(2.0).epsilon(1e-10));

    const TimeFactor ramp([](double s) { return s; });
    CHECK(ramp.A(2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ramp.A2(2.0) == doctest::Approx(8.0 / 6.0).epsilon(1e-10));
    CHECK(ramp.A_squared_integral(2.0) == doctest::Approx(32.0 / 20.0).epsilon(1e-10));
}

TEST_CASE("external gauge factor") {
    GridFunction v = GridFunction::sample(-1.0, 1.0, 9, [](double x) { return 1.0 + x * x; });

    const GridFunction same = gauge_external(v, [](double) { return 0.0; }, 3.0);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(same[i] == v[i]);

    const GridFunction e1 = gauge_external(v, [](double) { return 1.0; }, 1.0);
    CHECK(e1[4] == doctest::Approx(v[4] * std::numbers::e).epsilon(1e-13));

    // a(s) = s, t = 2: factor e^{int_0^2 s ds} = e^2
    const GridFunction e2 = gauge_external(v, [](double s) { return s; }, 2.0);
    CHECK(e2[0] == doctest::Approx(v[0] * std::exp(2.0)).epsilon(1e-12));
}

TEST_CASE("momentum inversion is the identity when the moment vanishes") {
    const Profile g = Profile::gaussian(1.0, 0.0);
    auto frames = heat_frames(g, 1.0, 100, -22.0, 22.0, 1024);
    const auto res = momentum_invert(frames, [](double x) { return x; });
    CHECK(res.denominators.back() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < frames.back().u.size(); ++i)
        CHECK(res.frames.back().u[i] == doctest::Approx(frames.back().u[i]).epsilon(1e-12));
}

TEST_CASE("drift-free flow: u = w/(1 + t int y u0)") {
    // First moment of the data is +0.8, so the denominator is 1 + 0.8 t.
    const Profile g = Profile::gaussian(1.0, 0.8);
    auto frames = heat_frames(g, 1.0, 400, -22.0, 24.0, 2048);
    const auto res = momentum_invert(frames, [](double x) { return x; });
    CHECK(res.denominators.back() == doctest::Approx(1.8).epsilon(1e-10));
    const auto& last = res.frames.back();
    const HeatEvaluator w = heat_of_profile(g);
    for (std::size_t i : {300u, 1024u, 1500u})
        CHECK(last.u[i] == doctest::Approx(w(1.0, last.u.x(i)) / 1.8).epsilon(1e-9));
}

TEST_CASE("drift-free flow blows up when the mass sits on the left") {
    const Profile g = Profile::gaussian(1.0, -1.0);
    auto frames = heat_frames(g, 1.05, 4200, -25.0, 23.0, 1024);
    try {
        momentum_invert(frames, [](double x) { return x; });
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.t_lower >= 0.999);
        CHECK(e.t_upper <= 1.001);
        CHECK(e.t_estimate == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("gauge-and-shift identity") {
    const Profile g = Profile::gaussian(1.0, 0.0);
    const HeatEvaluator w = heat_of_profile(g);
    // identity at t = 0
    CHECK(avron_herbst(w, 0.0, 1.3) == doctest::Approx(w(0.0, 1.3)).epsilon(1e-14));
    // constant field: pure exponential factor
    const HeatEvaluator one = [](double, double) { return 1.0; };
    CHECK(avron_herbst(one, 0.7, 1.1) ==
          doctest::Approx(std::exp(0.7 * 1.1 + 0.343 / 3.0)).epsilon(1e-13));
    // Dirac chain: e^{tx + t^3/3} (4 pi t)^{-1/2} e^{-(x + t^2)^2 / 4t}
    const HeatEvaluator k0 = [](double s, double z) { return heat_kernel(s, z, 0.0); };
    for (double x : {-2.0, 0.0, 1.5}) {
        const double t = 0.8;
        const double expected = std::exp(t * x + t * t * t / 3.0) *
                                heat_kernel(t, x + t * t, 0.0);
        CHECK(avron_herbst(k0, t, x) == doctest::Approx(expected).epsilon(1e-13));
    }
    // generalized form with a(t) = 1 collapses to the same formula
    const TimeFactor unit([](double) { return 1.0; });
    CHECK(avron_herbst(w, unit, 0.6, 0.9) ==
          doctest::Approx(avron_herbst(w, 0.6, 0.9)).epsilon(1e-9));
}

TEST_CASE("momentum inversion of the shifted Dirac chain recovers the elementary solution") {
    const HeatEvaluator k0 = [](double s, double z) { return heat_kernel(s, z, 0.0); };
    const double t_end = 0.8;
    std::vector<SolutionFrame> frames;
    const std::size_t n_t = 800;
    for (std::size_t j = 0; j <= n_t; ++j) {
        const double s = std::max(1e-6, t_end * static_cast<double>(j) / static_cast<double>(n_t));
        frames.push_back(make_frame(
            s, GridFunction::sample(-20.0, 20.0, 2048,
                                    [&](double x) { return avron_herbst(k0, s, x); })));
    }
    const auto res = momentum_invert(frames, [](double x) { return x; });
    const auto& last = res.frames.back();
    for (std::size_t i : {512u, 1024u, 1200u}) {
        const double x = last.u.x(i);
        const double expected = heat_kernel(t_end, x, t_end * t_end);
        CHECK(std::abs(last.u[i] - expected) < 1e-6);
    }
}

TEST_CASE("fundamental pair: constant and zero coefficients") {
    const auto pair1 = fundamental_pair([](double) { return 1.0; }, 3.0, 1e-3);
    for (double t : {0.5, 1.0, 2.0, 3.0}) {
        CHECK(std::abs(pair1.mu(t) - std::sinh(t)) < 1e-8);
        CHECK(std::abs(pair1.nu(t) - std::cosh(t)) < 1e-8);
    }
    // off-node query goes through the Hermite interpolant
    CHECK(std::abs(pair1.mu(0.77775) - std::sinh(0.77775)) < 1e-10);

    const auto pair0 = fundamental_pair([](double) { return 0.0; }, 2.0, 1e-2);
    CHECK(pair0.mu(1.37) == doctest::Approx(1.37).epsilon(1e-12));
    CHECK(pair0.nu(1.37) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fundamental pair: self-convergence and invariants for a(t) = 1 + t") {
    auto a = [](double t) { return 1.0 + t; };
    const auto coarse = fundamental_pair(a, 1.0, 1e-3);
    const auto fine = fundamental_pair(a, 1.0, 1e-3 / 16.0);
    CHECK(std::abs(coarse.mu(1.0) - fine.mu(1.0)) < 1e-8);
    CHECK(std::abs(coarse.nu(1.0) - fine.nu(1.0)) < 1e-8);

    const auto wavy = fundamental_pair([](double t) { return 1.0 + 0.5 * std::sin(t); }, 4.0, 1e-3);
    const auto ts = wavy.times();
    const auto mu = wavy.mu_values();
    const auto mud = wavy.mu_dot_values();
    const auto nu = wavy.nu_values();
    const auto nud = wavy.nu_dot_values();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(std::abs(mud[i] * nu[i] - mu[i] * nud[i] - 1.0) <= 1e-8);
        CHECK(nu[i] >= 1.0 - 1e-12);
        if (ts[i] > 0.0) CHECK(mu[i] > 0.0);
    }
}

TEST_CASE("fundamental pair: oversized steps abort") {
    CHECK_THROWS_AS(fundamental_pair([](double) { return 1.0; }, 5.0, 0.5), StepTooLargeError);
}

TEST_CASE("lens transform endpoints") {
    const Profile g = Profile::gaussian(1.0, 0.0);
    const HeatEvaluator w = heat_of_profile(g);
    const auto pair0 = fundamental_pair([](double) { return 0.0; }, 3.0, 1e-3);
    // a == 0: plain heat evolution at time t, and the identity at t = 0
    CHECK(lens_transform(w, pair0, 0.7, 1.1) == doctest::Approx(w(0.7, 1.1)).epsilon(1e-12));
    CHECK(lens_transform(w, pair0, 0.0, 0.4) == doctest::Approx(w(0.0, 0.4)).epsilon(1e-12));
    CHECK_THROWS_AS(lens_transform(w, pair0, 2.0, 0.0), DomainError);
}

TEST_CASE("mehler kernel: sign protocol and lens agreement") {
    CHECK(resolve_mehler_cross_sign() == MehlerCrossSign::Plus);

    const Profile g = Profile::gaussian(1.0, 0.0);
    const auto pair1 = fundamental_pair([](double) { return 1.0; }, 3.0, 1e-4);
    const HeatEvaluator w = heat_of_profile(g);
    double worst = 0.0, worst_minus = 0.0;
    for (double t : {0.25, 1.0})
        for (double x = -5.0; x <= 5.0; x += 0.5) {
            const double lens = lens_transform(w, pair1, t, x);
            worst = std::max(worst, std::abs(mehler_solution(g, t, x) - lens));
            worst_minus = std::max(
                worst_minus, std::abs(mehler_solution(g, t, x, MehlerCrossSign::Minus) - lens));
        }
    CHECK(worst < 1e-8);
    // the discarded sign genuinely disagrees (on an off-center comparison)
    const Profile off = Profile::gaussian(1.0, 0.7);
    const HeatEvaluator woff = heat_of_profile(off);
    double disagree = 0.0;
    for (double x : {-1.3, 1.8})
        disagree = std::max(disagree, std::abs(mehler_solution(off, 0.25, x, MehlerCrossSign::Minus) -
                                               lens_transform(woff, pair1, 0.25, x)));
    CHECK(disagree > 1e-6);
    (void)worst_minus;
}

TEST_CASE("mehler kernel: ground state evolution and the short-time limit") {
    const Profile g = Profile::gaussian(1.0, 0.0);
    for (double t : {0.25, 1.0})
        for (double x : {-1.0, 0.0, 1.0}) {
            const double expected = std::exp(-t) * std::exp(-0.5 * x * x) / kSqrt2Pi;
            CHECK(mehler_solution(g, t, x) == doctest::Approx(expected).epsilon(1e-10));
        }
    // second moment of v decays as e^{-t}
    for (double t : {0.25, 1.0}) {
        const double m2 = integrate(
            [&](double x) { return x * x * mehler_solution(g, t, x); }, -12.0, 12.0,
            {.rel_tol = 1e-11});
        CHECK(m2 == doctest::Approx(std::exp(-t)).epsilon(1e-9));
    }
    // kernel concentrates as t -> 0+
    for (double x : {-0.7, 0.2})
        CHECK(std::abs(mehler_solution(g, 1e-5, x) - g.density(x)) < 1e-4);
}

TEST_CASE("quadratic weight: ground state is stationary") {
    for (double t : {0.5, 1.0}) {
        const SolutionFrame f = quad_weight_solution(1.0, 0.0, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < f.u.size(); ++i) {
            const double x = f.u.x(i);
            worst = std::max(worst, std::abs(f.u[i] - std::exp(-0.5 * x * x) / kSqrt2Pi));
        }
        CHECK(worst < 1e-8);
    }
    // eigenfunction check: (-d_xx + x^2) e^{-x^2/2} = e^{-x^2/2}
    const SolutionFrame f = quad_weight_solution(1.0, 0.0, 0.5);
    const double h = f.u.dx();
    double worst_res = 0.0;
    for (std::size_t i = 2; i + 2 < f.u.size(); ++i) {
        const double x = f.u.x(i);
        if (std::abs(x) > 4.0) continue;
        const double d2 = (-f.u[i - 2] + 16.0 * f.u[i - 1] - 30.0 * f.u[i] + 16.0 * f.u[i + 1] -
                           f.u[i + 2]) /
                          (12.0 * h * h);
        worst_res = std::max(worst_res, std::abs(-d2 + x * x * f.u[i] - f.u[i]));
    }
    CHECK(worst_res < 1e-6);
}

TEST_CASE("quadratic weight: off-ground second moment matches the closed expression") {
    const auto st = quad_weight_v_state(2.0, 0.0, 0.5);
    const double quad = integrate(
        [&](double x) { return x * x * quad_weight_v(2.0, 0.0, 0.5, x); }, -14.0, 14.0,
        {.rel_tol = 1e-11});
    CHECK(st.second_moment == doctest::Approx(quad).epsilon(1e-9));
    // and the state starts from the data
    const auto at0 = quad_weight_v_state(2.0, -0.3, 0.0);
    CHECK(at0.a_t == doctest::Approx(2.0));
    CHECK(at0.m_t == doctest::Approx(-0.3));
}

TEST_CASE("gauge neutrality of the momentum route") {
    const Profile g = Profile::gaussian(1.0, 0.0);
    const HeatEvaluator w = heat_of_profile(g);
    const double t = 0.5;
    std::vector<SolutionFrame> plain, gauged;
    const std::function<double(double)> gauge = [](double s) { return s; };
    for (int j = 0; j <= 400; ++j) {
        const double s = t * j / 400.0;
        GridFunction base = GridFunction::sample(-30.0, 30.0, 2048, [&](double x) {
            return s == 0.0 ? w(0.0, x) : avron_herbst(w, s, x);
        });
        GridFunction scaled = base;
        const double factor = std::exp(0.5 * s * s);
        for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] *= factor;
        plain.push_back(make_frame(s, std::move(base)));
        gauged.push_back(make_frame(s, std::move(scaled)));
    }
    const auto res_plain = momentum_invert(plain, [](double x) { return x; });
    const auto res_gauged = momentum_invert(gauged, [](double x) { return x; }, &gauge);
    double worst = 0.0;
    for (std::size_t i = 0; i < res_plain.frames.back().u.size(); ++i)
        worst = std::max(worst, std::abs(res_plain.frames.back().u[i] -
                                         res_gauged.frames.back().u[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("transform route reproduces the explicit solution") {
    const Profile g = Profile::gaussian(1.0, 0.0);
    const Profile bump = smooth_bump();
    for (const Profile* p : {&g, &bump}) {
        for (double t : {0.1, 0.5}) {
            const SolutionFrame route = transform_route_frame(*p, t);
            double worst = 0.0;
            for (std::size_t i = 0; i < route.u.size(); ++i) {
                const double x = route.u.x(i);
                if (x < -10.0 || x > 10.0) continue;
                worst = std::max(worst, std::abs(route.u[i] - evaluate_u(*p, t, x)));
            }
            CHECK(worst < 1e-7);
        }
    }
}

} // TEST_SUITE
