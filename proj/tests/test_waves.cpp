#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rml/waves.hpp"
#include "support/oracles.hpp"

using namespace rml;
using rml::testing::kAiryZeros;

namespace {

// Sign changes of psi_c on [lo, hi], predicted by mapping the Airy zeros
// through the argument c^2/4 - x: zeros sit at x = c^2/4 - a_k.
int predicted_sign_changes(double c, double lo, double hi) {
    int n = 0;
    for (double a : kAiryZeros) {
        const double x = c * c / 4.0 - a;
        if (x >= lo && x <= hi) ++n;
    }
    return n;
}

} // namespace

TEST_SUITE("waves") {

TEST_CASE("speed positivity is a hard gate") {
    CHECK_THROWS_AS(solitary_wave(0.0, 1.0), NoSolitaryWaveError);
    CHECK_THROWS_AS(solitary_wave(-1.0, 1.0), NoSolitaryWaveError);
    CHECK_THROWS_AS(make_wave_profile(0.0, 0.0), NoSolitaryWaveError);
    CHECK_THROWS_AS(wave_from_fourier(0.0, 0.0), NoSolitaryWaveError);
    CHECK_THROWS_AS(sign_changes(0.0, -1.0, 1.0), NoSolitaryWaveError);
}

TEST_CASE("unit mass and zero mean for every speed") {
    for (double c : {1.0, 2.0}) {
        const WaveProfile wp = make_wave_profile(c, 0.0);
        CHECK(std::abs(wp.samples.integral() - 1.0) < 1e-6);
        CHECK(std::abs(wp.samples.moment(1)) < 1e-6);
        CHECK(wp.samples.min_value() < 0.0); // profiles change sign
    }
}

TEST_CASE("translation law") {
    for (double alpha : {-2.0, 0.0, 3.0}) {
        const WaveProfile wp = make_wave_profile(1.0, alpha);
        CHECK(std::abs(wp.samples.moment(1) - alpha) < 1e-6);
        CHECK(wp.samples.interpolate(alpha + 0.5) ==
              doctest::Approx(solitary_wave(1.0, 0.5)).epsilon(1e-6));
    }
}

TEST_CASE("defining equation residual") {
    const GridFunction window = GridFunction::zeros(-15.0, 10.0, 25001);
    CHECK(wave_residual(1.0, window) < 1e-5);
    CHECK(wave_residual(2.0, window) < 1e-5);
}

TEST_CASE("translated profile solves the centered equation") {
    // phi_{alpha,c}'' + c phi' + (x - alpha) phi = 0
    const double c = 1.0, alpha = 1.5, h = 1e-3;
    double sup = 0.0;
    for (double x = -10.0; x <= 8.0; x += 0.37) {
        auto phi = [&](double q) { return solitary_wave(c, q - alpha); };
        const double d1 = (phi(x - 2 * h) - 8 * phi(x - h) + 8 * phi(x + h) - phi(x + 2 * h)) /
                          (12.0 * h);
        const double d2 = (-phi(x - 2 * h) + 16 * phi(x - h) - 30 * phi(x) + 16 * phi(x + h) -
                           phi(x + 2 * h)) /
                          (12.0 * h * h);
        sup = std::max(sup, std::abs(d2 + c * d1 + (x - alpha) * phi(x)));
    }
    CHECK(sup < 1e-5);
}

TEST_CASE("fourier route agrees and is real") {
    for (double c : {1.0, 2.0, 3.0}) {
        for (double x : {-2.0, 0.0, 1.0, 2.5}) {
            const auto [re, im] = wave_from_fourier_parts(c, x);
            CHECK(std::abs(re - solitary_wave(c, x)) < 1e-7);
            CHECK(std::abs(im) < 1e-9);
        }
    }
    // c = 3, x = 1 named pair
    CHECK(std::abs(wave_from_fourier(3.0, 1.0) - solitary_wave(3.0, 1.0)) < 1e-7);
}

TEST_CASE("sign changes match the mapped Airy zeros") {
    // The oscillation lives where the Ai argument c^2/4 - x is negative,
    // i.e. to the RIGHT of the front at x = c^2/4.
    struct Case {
        double c, lo, hi;
    };
    for (const Case k : {Case{1.0, -15.0, 5.0}, Case{1.0, 5.0, 10.0}, Case{1.0, -5.0, 15.0},
                         Case{2.0, -15.0, 5.0}, Case{2.0, 5.0, 10.0}, Case{2.0, -5.0, 15.0}}) {
        CHECK(sign_changes(k.c, k.lo, k.hi) == predicted_sign_changes(k.c, k.lo, k.hi));
    }
    // frozen counts for the record
    CHECK(sign_changes(1.0, -15.0, 5.0) == 2);
    CHECK(sign_changes(1.0, 5.0, 10.0) == 4);
    CHECK(sign_changes(1.0, -5.0, 15.0) == 12);
    CHECK(sign_changes(2.0, -15.0, 5.0) == 1);
    // left of the front the wave is single-signed
    CHECK(sign_changes(1.0, -15.0, 0.0) == 0);
    // every admissible speed produces a sign-changing profile
    for (double c : {0.9, 1.5, 2.5}) CHECK(sign_changes(c, -15.0, 15.0) >= 1);
}

TEST_CASE("right tail decays at rate c/2") {
    // psi(x) e^{cx/2} = e^{c^3/12} Ai(c^2/4 - x) stays within the global Ai
    // bound |Ai| <= Ai(a'_1) ~ 0.5357 for all x.
    for (double c : {1.0, 2.0}) {
        double sup = 0.0;
        for (double x = 0.0; x <= 30.0; x += 0.25)
            sup = std::max(sup, std::abs(solitary_wave(c, x)) * std::exp(0.5 * c * x));
        CHECK(sup < 1.1 * std::exp(c * c * c / 12.0) * 0.5357);
    }
}

TEST_CASE("window validation") {
    CHECK_THROWS_AS(wave_residual(1.0, GridFunction::zeros(0.0, 1.0, 4)), std::invalid_argument);
    CHECK_THROWS_AS(sign_changes(1.0, 2.0, 1.0), std::invalid_argument);
}

} // TEST_SUITE
