#pragma once

#include <stdexcept>
#include <string>

namespace rml {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// normalize(): the profile integral diverges or is zero.
struct NonIntegrableError : Error {
    using Error::Error;
};

/// Evaluation requested strictly past the profile's lifespan T.
struct OutOfLifespanError : Error {
    using Error::Error;
};

/// Heavy-tailed profile (T = 0): the solution is defined for no t > 0.
struct NeverDefinedError : Error {
    using Error::Error;
};

/// Argument outside the documented domain of a function or transform.
struct DomainError : Error {
    using Error::Error;
};

/// deviation() requires a compactly supported sampled profile.
struct NotCompactError : Error {
    using Error::Error;
};

/// Momentum-factor denominator 1 + int_0^t vbar crossed zero.
struct BlowUpError : Error {
    BlowUpError(double lo, double hi, double estimate)
        : Error("momentum denominator vanishes between t = " + std::to_string(lo) +
                " and t = " + std::to_string(hi)),
          t_lower(lo), t_upper(hi), t_estimate(estimate) {}

    double t_lower;    ///< last frame time with positive denominator
    double t_upper;    ///< first frame time at or past the crossing
    double t_estimate; ///< linear-interpolation estimate of the crossing
};

/// fundamental_pair(): Wronskian drifted beyond tolerance; reduce dt.
struct StepTooLargeError : Error {
    using Error::Error;
};

/// compare(): frame sequences do not share grids and times.
struct GridMismatchError : Error {
    using Error::Error;
};

/// Oracle: too much mass reached the boundary cells; the domain is too small
/// for the accelerating pulse.
struct DomainEscapeError : Error {
    DomainEscapeError(double t_, double fraction)
        : Error("mass fraction " + std::to_string(fraction) +
                " reached the boundary cells at t = " + std::to_string(t_)),
          t(t_), mass_fraction(fraction) {}

    double t;
    double mass_fraction;
};

/// Oracle: values exceeded the stability cap.
struct UnstableError : Error {
    using Error::Error;
};

/// Solitary waves exist only for c > 0.
struct NoSolitaryWaveError : Error {
    using Error::Error;
};

/// Log-space result exceeds the representable range (mis-scaled inputs).
struct OverflowError : Error {
    using Error::Error;
};

} // namespace rml
