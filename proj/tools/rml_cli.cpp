// Command-line runner for the replicator-mutator solution toolkit.
//
// Exit codes: 0 success; 1 no solitary wave (c <= 0); 2 heavy-tailed data
// (the refusal is the correct answer, not a crash); 3 numeric failure
// (domain escape / instability); 64 malformed spec or usage.
//
// The environment variable RML_SEED is reserved for reproducibility switches;
// nothing reads it yet.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rml/io.hpp"
#include "rml/oracle.hpp"
#include "rml/rml.hpp"

namespace fs = std::filesystem;
using rml::io::json;

namespace {

struct ScenarioSpec {
    std::string name;
    rml::Profile profile;
    std::vector<double> times;
    rml::ReactionWeight weight = rml::ReactionWeight::Linear;
    std::vector<std::string> outputs{"frames.csv", "summary.json"};
    std::optional<json> oracle;
    std::optional<double> wave_c;
};

ScenarioSpec parse_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec file: " + path.string());
    json doc = json::parse(in);

    ScenarioSpec spec{doc.value("name", std::string{}),
                      rml::io::profile_from_json(doc.at("profile")),
                      {},
                      rml::ReactionWeight::Linear,
                      doc.value("outputs", std::vector<std::string>{"frames.csv", "summary.json"}),
                      std::nullopt,
                      std::nullopt};
    if (spec.name.empty()) throw std::invalid_argument("scenario name must be nonempty");
    if (doc.contains("times")) {
        spec.times = doc.at("times").get<std::vector<double>>();
        for (std::size_t i = 1; i < spec.times.size(); ++i)
            if (!(spec.times[i] > spec.times[i - 1]))
                throw std::invalid_argument("scenario times must be strictly increasing");
    }
    const std::string w = doc.value("weight", std::string{"linear"});
    if (w == "linear")
        spec.weight = rml::ReactionWeight::Linear;
    else if (w == "quadratic")
        spec.weight = rml::ReactionWeight::Quadratic;
    else
        throw std::invalid_argument("weight must be 'linear' or 'quadratic'");
    if (doc.contains("oracle")) spec.oracle = doc.at("oracle");
    if (doc.contains("wave_c")) spec.wave_c = doc.at("wave_c").get<double>();
    return spec;
}

bool wants(const ScenarioSpec& spec, const std::string& file) {
    for (const auto& o : spec.outputs)
        if (o == file) return true;
    return false;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << text;
}

json compare_to_json(const rml::CompareReport& rep) {
    json frames = json::array();
    for (const auto& f : rep.frames)
        frames.push_back({{"t", f.t}, {"sup_du", f.sup_du}, {"d_ubar", f.d_ubar},
                          {"d_mass", f.d_mass}});
    return {{"frames", frames},
            {"max_sup_du", rep.max_sup_du},
            {"max_d_ubar", rep.max_d_ubar},
            {"max_d_mass", rep.max_d_mass}};
}

rml::OracleConfig oracle_config(const ScenarioSpec& spec, double t_end, std::size_t grid_n,
                                double dt) {
    rml::OracleConfig cfg = rml::OracleConfig::suggest(spec.profile, t_end, grid_n, dt);
    if (spec.oracle) {
        const json& o = *spec.oracle;
        if (o.contains("x_lo")) cfg.x_lo = o.at("x_lo").get<double>();
        if (o.contains("x_hi")) cfg.x_hi = o.at("x_hi").get<double>();
    }
    cfg.record_times = spec.times.empty() ? std::vector<double>{t_end} : spec.times;
    if (cfg.record_times.back() < t_end) cfg.record_times.push_back(t_end);
    return cfg;
}

int run_solve(const ScenarioSpec& spec, const fs::path& out_dir, std::size_t grid_n, bool quiet) {
    const rml::SolveStatus status = rml::solve_status(spec.profile);
    json summary;
    summary["name"] = spec.name;
    summary["classification"] = rml::io::tail_class_to_json(rml::classify_tail(spec.profile));
    summary["status"] = rml::io::existence_name(status.status);
    summary["T"] = rml::io::extended_real(status.T);
    if (status.status == rml::Existence::Extinct) summary["after"] = status.after;

    if (status.status == rml::Existence::NeverDefined) {
        // Ill-posed data: refuse without attempting numerics.
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
        if (!quiet)
            std::cerr << "profile classified Heavy: solution defined for no t > 0\n";
        return 2;
    }

    std::vector<rml::SolutionFrame> frames;
    json frame_meta = json::array();
    for (double t : spec.times) {
        if (spec.weight == rml::ReactionWeight::Quadratic) {
            if (spec.profile.kind() != rml::ProfileKind::Gaussian)
                throw std::invalid_argument("quadratic weight runs need gaussian data");
            const auto& g = spec.profile.as<rml::GaussianProfile>();
            frames.push_back(rml::quad_weight_solution(g.a, g.m, t, grid_n));
            frame_meta.push_back(rml::io::frame_sidecar(frames.back(), status));
            continue;
        }
        if (t >= status.T && std::isfinite(status.T)) {
            // Past the lifespan the extension by zero is the solution.
            rml::GridFunction zeros = rml::GridFunction::zeros(-1.0, 1.0, 8);
            frames.push_back(rml::SolutionFrame{t, std::move(zeros), 0.0, 0.0});
            frame_meta.push_back({{"t", t}, {"u_bar", nullptr}, {"mass", 0.0},
                                  {"status", "extinct"}});
            continue;
        }
        frames.push_back(rml::solve_frame(spec.profile, t, grid_n));
        frame_meta.push_back(rml::io::frame_sidecar(frames.back(), status));
    }
    summary["frames"] = frame_meta;

    if (wants(spec, "frames.csv")) {
        std::ostringstream csv;
        rml::io::write_frames_csv(csv, frames);
        write_text(out_dir / "frames.csv", csv.str());
    }
    if (wants(spec, "wave.csv") && spec.wave_c) {
        const rml::WaveProfile wp = rml::make_wave_profile(*spec.wave_c, 0.0);
        std::ostringstream csv;
        rml::io::write_wave_csv(csv, wp.samples);
        write_text(out_dir / "wave.csv", csv.str());
        summary["wave"] = {{"c", wp.c},
                           {"integral", wp.samples.integral()},
                           {"first_moment", wp.samples.moment(1)}};
    }
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    if (!quiet) std::cout << "wrote " << (out_dir / "summary.json").string() << "\n";
    return 0;
}

int run_oracle(const ScenarioSpec& spec, const fs::path& out_dir, double t_end,
               std::size_t grid_n, double dt, bool quiet) {
    const rml::SolveStatus status = rml::solve_status(spec.profile);
    json summary;
    summary["name"] = spec.name;
    summary["status"] = rml::io::existence_name(status.status);
    if (status.status != rml::Existence::Alive) {
        summary["T"] = rml::io::extended_real(status.T);
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
        if (!quiet) std::cerr << "oracle runs only on globally defined (VeryLight) data\n";
        return 2;
    }

    const rml::OracleConfig cfg = oracle_config(spec, t_end, grid_n, dt);
    summary["oracle_config"] = {{"x_lo", cfg.x_lo}, {"x_hi", cfg.x_hi}, {"n", cfg.n},
                                {"dt", cfg.dt},     {"t_end", t_end},
                                {"scheme", "crank_nicolson_strang"},
                                {"boundary", "dirichlet0"}};

    const auto start = std::chrono::steady_clock::now();
    std::vector<rml::SolutionFrame> frames;
    try {
        frames = rml::integrate(spec.profile, cfg, t_end, spec.weight);
    } catch (const rml::DomainEscapeError& e) {
        summary["error"] = {{"kind", "DomainEscape"}, {"t", e.t},
                            {"mass_fraction", e.mass_fraction}};
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const rml::UnstableError& e) {
        summary["error"] = {{"kind", "Unstable"}};
        write_text(out_dir / "summary.json", summary.dump(2) + "\n");
        std::cerr << e.what() << "\n";
        return 3;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const rml::CompareReport report = rml::compare(
        [&](double t, double x) {
            if (spec.weight == rml::ReactionWeight::Quadratic) {
                const auto& g = spec.profile.as<rml::GaussianProfile>();
                const rml::SolutionFrame f = rml::quad_weight_solution(g.a, g.m, t, 512);
                return f.u.interpolate(x);
            }
            return t == 0.0 ? spec.profile.density(x) : rml::evaluate_u(spec.profile, t, x);
        },
        frames);

    json frame_meta = json::array();
    for (const auto& f : frames) frame_meta.push_back(rml::io::frame_sidecar(f, status));
    summary["frames"] = frame_meta;
    summary["compare"] = compare_to_json(report);
    summary["runtime_seconds"] = seconds;

    if (wants(spec, "frames.csv")) {
        std::ostringstream csv;
        rml::io::write_frames_csv(csv, frames);
        write_text(out_dir / "frames.csv", csv.str());
    }
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    if (!quiet)
        std::cout << "sup error " << report.max_sup_du << ", mass drift " << report.max_d_mass
                  << "\n";
    return 0;
}

int run_quadratic(const ScenarioSpec& spec, const fs::path& out_dir, std::size_t grid_n,
                  bool quiet) {
    if (spec.profile.kind() != rml::ProfileKind::Gaussian)
        throw std::invalid_argument("quadratic runs need gaussian data");
    const auto& g = spec.profile.as<rml::GaussianProfile>();

    json summary;
    summary["name"] = spec.name;
    summary["weight"] = "quadratic";
    std::vector<rml::SolutionFrame> frames;
    json frame_meta = json::array();
    try {
        for (double t : spec.times.empty() ? std::vector<double>{0.5, 1.0} : spec.times) {
            frames.push_back(rml::quad_weight_solution(g.a, g.m, t, grid_n));
            const auto st = rml::quad_weight_v_state(g.a, g.m, t);
            frame_meta.push_back({{"t", t},
                                  {"u_bar", frames.back().u_bar},
                                  {"mass", frames.back().mass},
                                  {"second_moment_v", st.second_moment}});
        }
        summary["status"] = "Alive";
    } catch (const rml::BlowUpError& e) {
        // Reported, not suppressed: the denominator genuinely vanished.
        summary["status"] = "BlowUp";
        summary["blow_up"] = {{"t_lower", e.t_lower}, {"t_upper", e.t_upper},
                              {"t_estimate", e.t_estimate}};
    }
    summary["frames"] = frame_meta;
    if (wants(spec, "frames.csv") && !frames.empty()) {
        std::ostringstream csv;
        rml::io::write_frames_csv(csv, frames);
        write_text(out_dir / "frames.csv", csv.str());
    }
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    if (!quiet) std::cout << "wrote " << (out_dir / "summary.json").string() << "\n";
    return 0;
}

int run_wave(double c, double alpha, const std::optional<fs::path>& out_dir, bool quiet) {
    rml::WaveProfile wp = rml::make_wave_profile(c, alpha);
    const double residual = rml::wave_residual(c, rml::GridFunction::zeros(-15.0, 10.0, 25001));
    json report;
    report["c"] = c;
    report["alpha"] = alpha;
    report["integral"] = wp.samples.integral();
    report["first_moment"] = wp.samples.moment(1);
    report["ode_residual_sup"] = residual;
    report["sign_changes_near_front"] = rml::sign_changes(c, alpha + c * c / 4.0 - 5.0,
                                                          alpha + c * c / 4.0 + 20.0);
    if (out_dir) {
        std::ostringstream csv;
        rml::io::write_wave_csv(csv, wp.samples);
        write_text(*out_dir / "wave.csv", csv.str());
        write_text(*out_dir / "summary.json", report.dump(2) + "\n");
    }
    if (!quiet) std::cout << report.dump(2) << "\n";
    return 0;
}

int run_selftest(bool quiet) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        if (!ok) ++failures;
        if (!quiet || !ok) std::printf("%-52s %s\n", name, ok ? "ok" : "FAIL");
    };
    using namespace rml;

    check("erf_upper symmetry",
          std::abs(erf_upper(1.3) + erf_upper(-1.3) - kSqrt2Pi) < 1e-12);
    check("erf_upper(1) reference", std::abs(erf_upper(1.0) - 0.3976897454233514) < 1e-12);
    check("airy Ai(0)", std::abs(airy_ai(0.0) - 0.35502805388781724) < 1e-12);
    check("airy Ai(-5)", std::abs(airy_ai(-5.0) - 0.3507610090241142) < 1e-10);
    {
        bool ok = true;
        for (double x : {-2.0, 0.0, 2.0}) {
            const double h = 1e-3;
            const double d2 = (-airy_ai(x - 2 * h) + 16 * airy_ai(x - h) - 30 * airy_ai(x) +
                               16 * airy_ai(x + h) - airy_ai(x + 2 * h)) /
                              (12 * h * h);
            ok = ok && std::abs(d2 - x * airy_ai(x)) < 1e-7;
        }
        check("airy defining equation", ok);
    }
    check("heat kernel diagonal",
          std::abs(heat_kernel(1.0, 0.0, 0.0) - 0.28209479177387814) < 1e-14);

    check("classification: gaussian global",
          classify_tail(Profile::gaussian(1.0, 0.0)).kind == TailKind::VeryLight);
    check("classification: exponential tail extinct at alpha",
          classify_tail(Profile::exponential_tail(0.7)).T == 0.7);
    check("classification: algebraic tail never defined",
          classify_tail(Profile::algebraic_tail(2.0)).kind == TailKind::Heavy);

    {
        const auto s = gaussian_solution(1.0, 0.0, 1.0);
        check("gaussian propagation parameters",
              std::abs(s.a - 1.0 / 3.0) < 1e-15 && std::abs(s.m - 2.0) < 1e-15);
        const auto f = solve_frame(Profile::gaussian(1.0, 0.0), 1.0, 2048);
        check("gaussian frame mass and mean",
              std::abs(f.mass - 1.0) < 1e-6 && std::abs(f.u_bar - 2.0) < 1e-6);
    }
    check("extinction closed form",
          std::abs(extinction_profile(1.0, 0.5, 0.0) - 0.14549764028427392) < 1e-13);
    check("mean fitness: exponential tail",
          mean_fitness(Profile::exponential_tail(1.0), 0.5) == 2.25);
    check("mean fitness: dirac", mean_fitness(Profile::dirac(0.0), 0.7) == 0.7 * 0.7);
    {
        const auto pair = fundamental_pair([](double) { return 1.0; }, 2.0, 1e-3);
        check("oscillator pair sinh/cosh",
              std::abs(pair.mu(1.0) - std::sinh(1.0)) < 1e-8 &&
                  std::abs(pair.nu(1.0) - std::cosh(1.0)) < 1e-8);
    }
    check("mehler cross sign resolves to plus",
          resolve_mehler_cross_sign() == MehlerCrossSign::Plus);
    {
        const SolutionFrame f = quad_weight_solution(1.0, 0.0, 0.5, 1024);
        double worst = 0.0;
        for (std::size_t i = 0; i < f.u.size(); ++i) {
            const double x = f.u.x(i);
            worst = std::max(worst, std::abs(f.u[i] - std::exp(-0.5 * x * x) / kSqrt2Pi));
        }
        check("quadratic-weight ground state stationary", worst < 1e-8);
    }
    {
        const WaveProfile wp = make_wave_profile(1.0, 0.0, 0.0, 0.0, 8001);
        check("solitary wave integrals",
              std::abs(wp.samples.integral() - 1.0) < 1e-6 &&
                  std::abs(wp.samples.moment(1)) < 1e-6);
        check("solitary wave changes sign", wp.samples.min_value() < 0.0);
    }
    {
        bool got = false;
        double estimate = 0.0;
        try {
            const Profile g = Profile::gaussian(1.0, -1.0);
            const auto w = heat_of_profile(g);
            std::vector<SolutionFrame> frames;
            for (int j = 0; j <= 1100; ++j) {
                const double s = 1.05 * j / 1050.0;
                frames.push_back(make_frame(
                    s, GridFunction::sample(-24.0, 22.0, 512, [&](double x) { return w(s, x); })));
            }
            momentum_invert(frames, [](double x) { return x; });
        } catch (const BlowUpError& e) {
            got = true;
            estimate = e.t_estimate;
        }
        check("drift-free blow-up at t = 1", got && std::abs(estimate - 1.0) < 1e-2);
    }
    {
        const Profile g = Profile::gaussian(1.0, 0.0);
        OracleConfig cfg = OracleConfig::suggest(g, 0.1, 256, 1e-3);
        cfg.record_times = {0.1};
        const auto frames = integrate(g, cfg, 0.1, ReactionWeight::Linear);
        const auto rep = compare([&](double t, double x) { return evaluate_u(g, t, x); }, frames);
        check("direct integrator matches closed form", rep.max_sup_du < 5e-3);
    }
    {
        const SolutionFrame route = transform_route_frame(Profile::gaussian(1.0, 0.0), 0.25);
        double worst = 0.0;
        for (std::size_t i = 0; i < route.u.size(); ++i) {
            const double x = route.u.x(i);
            if (std::abs(x) > 8.0) continue;
            worst = std::max(worst,
                             std::abs(route.u[i] - evaluate_u(Profile::gaussian(1.0, 0.0), 0.25, x)));
        }
        check("transform route equals explicit formula", worst < 1e-7);
    }

    if (!quiet) std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rml: explicit solutions for replicator-mutator dynamics"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = ".";
    std::size_t grid_n = 4096;   // evaluation window points (solve/quadratic)
    std::size_t oracle_n = 2048; // direct-integrator grid points
    double dt = 1e-4, t_end = 0.5, c = 1.0, alpha = 0.0;
    bool quiet = false;

    auto* classify = app.add_subcommand("classify", "tail classification as JSON");
    classify->add_option("--spec", spec_path, "scenario or profile JSON")->required();

    auto* solve = app.add_subcommand("solve", "closed-form frames at the scenario times");
    solve->add_option("--spec", spec_path)->required();
    solve->add_option("--out", out_dir);
    solve->add_option("--grid-n", grid_n);

    auto* oracle = app.add_subcommand("oracle", "direct PDE integration and comparison");
    oracle->add_option("--spec", spec_path)->required();
    oracle->add_option("--out", out_dir);
    oracle->add_option("--grid-n", oracle_n);
    oracle->add_option("--dt", dt);
    oracle->add_option("--t-end", t_end);

    auto* wave = app.add_subcommand("wave", "solitary wave profile and residual report");
    wave->add_option("--c", c, "wave speed (> 0)")->required();
    wave->add_option("--alpha", alpha, "centering (mean of the profile)");
    wave->add_option("--out", out_dir);

    auto* quadratic = app.add_subcommand("quadratic", "quadratic-weight gaussian runs");
    quadratic->add_option("--spec", spec_path)->required();
    quadratic->add_option("--out", out_dir);
    quadratic->add_option("--grid-n", grid_n);

    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant battery");

    for (CLI::App* sub : {classify, solve, oracle, wave, quadratic, selftest})
        sub->add_flag("--quiet", quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (selftest->parsed()) return run_selftest(quiet);
        if (wave->parsed()) {
            std::optional<fs::path> out;
            if (wave->count("--out")) {
                out = fs::path(out_dir);
                fs::create_directories(*out);
            }
            return run_wave(c, alpha, out, quiet);
        }

        const ScenarioSpec spec = parse_scenario(spec_path);
        if (classify->parsed()) {
            std::cout << rml::io::tail_class_to_json(rml::classify_tail(spec.profile)).dump()
                      << "\n";
            return 0;
        }
        fs::create_directories(out_dir);
        if (solve->parsed()) return run_solve(spec, out_dir, grid_n, quiet);
        if (oracle->parsed()) {
            // scenario-file settings apply where no explicit flag was given
            if (spec.oracle) {
                const json& o = *spec.oracle;
                if (o.contains("t_end") && oracle->count("--t-end") == 0)
                    t_end = o.at("t_end").get<double>();
                if (o.contains("n") && oracle->count("--grid-n") == 0)
                    oracle_n = o.at("n").get<std::size_t>();
                if (o.contains("dt") && oracle->count("--dt") == 0)
                    dt = o.at("dt").get<double>();
            }
            return run_oracle(spec, out_dir, t_end, oracle_n, dt, quiet);
        }
        if (quadratic->parsed()) return run_quadratic(spec, out_dir, grid_n, quiet);
        return 64;
    } catch (const rml::NoSolitaryWaveError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const rml::NeverDefinedError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const rml::DomainEscapeError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const rml::UnstableError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 64;
    } catch (const std::invalid_argument& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 64;
    } catch (const rml::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
