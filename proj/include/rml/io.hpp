#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "rml/closedform.hpp"
#include "rml/grid.hpp"
#include "rml/profiles.hpp"
#include "rml/reductions.hpp"

namespace rml::io {

using json = nlohmann::ordered_json;

/// Fixed float formatting: 17 significant digits, so identical inputs produce
/// byte-identical files.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Extended reals serialize as a number when finite, the string "inf"
/// otherwise; integral values print without a fractional part.
inline json extended_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::rint(v) == v && std::abs(v) < 1e15) return static_cast<std::int64_t>(v);
    return v;
}

inline json profile_to_json(const Profile& p) {
    json j;
    switch (p.kind()) {
        case ProfileKind::Gaussian: {
            const auto& g = p.as<GaussianProfile>();
            j["kind"] = "gaussian";
            j["a"] = g.a;
            j["m"] = g.m;
            break;
        }
        case ProfileKind::ExponentialTail: {
            j["kind"] = "exponential_tail";
            j["alpha"] = p.as<ExponentialTailProfile>().alpha;
            break;
        }
        case ProfileKind::ModifiedExponentialTail: {
            const auto& m = p.as<ModifiedExponentialTailProfile>();
            j["kind"] = "modified_exponential_tail";
            j["alpha"] = m.alpha;
            j["normalizer"] = m.normalizer;
            break;
        }
        case ProfileKind::AlgebraicTail: {
            const auto& a = p.as<AlgebraicTailProfile>();
            j["kind"] = "algebraic_tail";
            j["p"] = a.p;
            j["normalizer"] = a.normalizer;
            break;
        }
        case ProfileKind::Dirac: {
            j["kind"] = "dirac";
            j["x0"] = p.as<DiracProfile>().x0;
            break;
        }
        case ProfileKind::CompactSampled: {
            const auto& c = p.as<CompactSampledProfile>();
            j["kind"] = "compact_sampled";
            j["grid"] = {{"x_lo", c.grid.x_lo()},
                         {"x_hi", c.grid.x_hi()},
                         {"values", std::vector<double>(c.grid.values().begin(),
                                                        c.grid.values().end())}};
            j["support"] = {c.support_lo, c.support_hi};
            break;
        }
    }
    return j;
}

inline Profile profile_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian")
        return Profile::gaussian(j.at("a").get<double>(), j.at("m").get<double>());
    if (kind == "exponential_tail")
        return Profile::exponential_tail(j.at("alpha").get<double>());
    if (kind == "modified_exponential_tail") {
        if (j.contains("normalizer"))
            return Profile::modified_exponential_tail(j.at("alpha").get<double>(),
                                                      j.at("normalizer").get<double>());
        return Profile::modified_exponential_tail(j.at("alpha").get<double>());
    }
    if (kind == "algebraic_tail") {
        if (j.contains("normalizer"))
            return Profile::algebraic_tail(j.at("p").get<double>(),
                                           j.at("normalizer").get<double>());
        return Profile::algebraic_tail(j.at("p").get<double>());
    }
    if (kind == "dirac") return Profile::dirac(j.at("x0").get<double>());
    if (kind == "compact_sampled") {
        const auto& g = j.at("grid");
        GridFunction grid(g.at("x_lo").get<double>(), g.at("x_hi").get<double>(),
                          g.at("values").get<std::vector<double>>());
        if (j.contains("support"))
            return Profile::compact_sampled(std::move(grid), j.at("support").at(0).get<double>(),
                                            j.at("support").at(1).get<double>());
        return Profile::compact_sampled(std::move(grid));
    }
    throw std::invalid_argument("profile_from_json: unknown kind '" + kind + "'");
}

inline json tail_class_to_json(const TailClass& tc) {
    json j;
    switch (tc.kind) {
        case TailKind::VeryLight: j["class"] = "VeryLight"; break;
        case TailKind::Light: j["class"] = "Light"; break;
        case TailKind::Heavy: j["class"] = "Heavy"; break;
    }
    j["T"] = extended_real(tc.T);
    return j;
}

inline std::string existence_name(Existence e) {
    switch (e) {
        case Existence::Alive: return "Alive";
        case Existence::Extinct: return "Extinct";
        case Existence::NeverDefined: return "NeverDefined";
    }
    return "?";
}

inline json status_to_json(const SolveStatus& st) {
    json j;
    j["status"] = existence_name(st.status);
    j["T"] = extended_real(st.T);
    if (st.status == Existence::Extinct) j["after"] = st.after;
    return j;
}

inline json frame_sidecar(const SolutionFrame& f, const SolveStatus& st) {
    json j;
    j["t"] = f.t;
    j["u_bar"] = f.u_bar;
    j["mass"] = f.mass;
    j["status"] = existence_name(st.status);
    return j;
}

/// CSV rows (t, x, u), one block per frame, single header.
inline void write_frames_csv(std::ostream& os, std::span<const SolutionFrame> frames) {
    os << "t,x,u\n";
    for (const auto& f : frames)
        for (std::size_t i = 0; i < f.u.size(); ++i)
            os << format_double(f.t) << ',' << format_double(f.u.x(i)) << ','
               << format_double(f.u[i]) << '\n';
}

inline void write_wave_csv(std::ostream& os, const GridFunction& psi) {
    os << "x,psi\n";
    for (std::size_t i = 0; i < psi.size(); ++i)
        os << format_double(psi.x(i)) << ',' << format_double(psi[i]) << '\n';
}

inline void write_pair_csv(std::ostream& os, const FundamentalPair& pair) {
    os << "t,mu,nu,mu_dot,nu_dot\n";
    const auto t = pair.times();
    const auto mu = pair.mu_values();
    const auto nu = pair.nu_values();
    const auto mud = pair.mu_dot_values();
    const auto nud = pair.nu_dot_values();
    for (std::size_t i = 0; i < t.size(); ++i)
        os << format_double(t[i]) << ',' << format_double(mu[i]) << ',' << format_double(nu[i])
           << ',' << format_double(mud[i]) << ',' << format_double(nud[i]) << '\n';
}

} // namespace rml::io
