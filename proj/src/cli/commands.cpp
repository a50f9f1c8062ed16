#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ensplace/cli.hpp"
#include "ensplace/feasibility.hpp"
#include "ensplace/gain.hpp"
#include "ensplace/simulation.hpp"
#include "ensplace/special.hpp"
#include "ensplace/spectral.hpp"

namespace ensplace::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct Flags {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string mode;
    std::string targets;
    bool strict = false;
    std::string report_dir;
    double d = 0.0;
    double tol = 1e-10;
};

struct Session {
    RunConfig cfg;
    MaterializedEnsemble ens;
    TargetSpectrum targets;
    std::ostream& out;
    std::ostream& err;
};

RunConfig load(const Flags& f) {
    Json doc = load_config_document(f.config_path);
    for (const auto& o : f.overrides) apply_override(doc, o);
    if (!f.targets.empty()) apply_override(doc, "targets.mode=\"" + f.targets + "\"");
    RunConfig cfg = parse_config(doc);
    if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
    if (f.strict) cfg.strict = true;
    return cfg;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// The only artifact that carries a timestamp.
void write_meta(const std::filesystem::path& dir, const std::string& command, const std::string& config) {
    Json meta;
    meta["tool"] = "ensplace";
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["config"] = config;
    meta["generated_at"] = iso_now();
    write_json_file(meta, dir / "meta.json");
}

void emit_json(const Session& s, const Json& j, const char* name) {
    std::filesystem::create_directories(s.cfg.output_dir);
    if (s.cfg.write_json) write_json_file(j, s.cfg.output_dir / name);
}

Json validation_json(const ValidationReport& rep, std::size_t window) {
    Json j;
    j["passed"] = rep.passed;
    j["window"] = window;
    Json v = Json::array();
    for (const auto& x : rep.violations)
        v.push_back(Json{{"code", to_string(x.code)}, {"index", x.index}, {"message", x.message}});
    j["violations"] = v;
    return j;
}

Json gains_json(const GainVector& g, const std::string& targets) {
    Json j;
    j["mode"] = to_string(g.mode);
    j["targets"] = targets;
    j["N"] = g.N;
    j["M"] = g.M;
    Json entries = Json::array();
    double l1 = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        Json e;
        e["n"] = n + 1;
        e["re"] = number_or_null(g.entries[n].real());
        e["im"] = number_or_null(g.entries[n].imag());
        e["abs"] = number_or_null(std::abs(g.entries[n]));
        e["log_abs"] = number_or_null(g.log_abs[n]);
        e["tail_estimate"] = number_or_null(g.per_entry_tail[n]);
        entries.push_back(e);
        l1 += std::abs(g.entries[n]);
    }
    j["entries"] = entries;
    j["l1_norm"] = g.finite() ? number_or_null(l1) : Json(nullptr);
    Json div = Json::array();
    Json detail = Json::array();
    for (const auto& d : g.diverged) {
        div.push_back(d.n);
        detail.push_back(
            Json{{"n", d.n}, {"m_at_trip", d.m_at_trip}, {"log_magnitude", number_or_null(d.log_magnitude)}});
    }
    j["diverged"] = div;
    j["divergence_detail"] = detail;
    return j;
}

Json winding_json(const WindingResult& w) {
    return Json{{"center", complex_json(w.contour.center)},
                {"radius", w.contour.radius},
                {"samples", w.contour.samples},
                {"winding", w.winding},
                {"raw", w.raw},
                {"min_abs_h", w.min_abs_h}};
}

Session open_session(const Flags& f, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load(f);
    MaterializedEnsemble ens = materialize(cfg.ensemble);
    TargetSpectrum targets = materialize_targets(cfg.targets, ens);
    return Session{std::move(cfg), std::move(ens), std::move(targets), out, err};
}

// Every model command refuses ensembles that violate the necessary
// conditions; `validate` reports them.
void require_valid(const Session& s) {
    const ValidationReport rep = validate_necessary(s.ens);
    if (!rep.passed) {
        throw ConfigError("ensemble violates the necessary conditions (" + rep.violations.front().message +
                          "); run `validate` for the full list");
    }
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
    Session s = open_session(f, out, err);
    const ValidationReport rep = validate_necessary(s.ens);
    emit_json(s, validation_json(rep, s.ens.size()), "validation.json");
    write_meta(s.cfg.output_dir, "validate", f.config_path);
    out << "validation " << (rep.passed ? "passed" : "failed") << " on " << s.ens.size() << " modes\n";
    for (const auto& v : rep.violations) err << "  n=" << v.index << ": " << v.message << "\n";
    return rep.passed ? kExitOk : kExitInvalid;
}

int cmd_series(const Flags& f, bool is_zeta, std::ostream& out) {
    const SeriesValue v = is_zeta ? zeta(f.d, f.tol) : xi(f.d, f.tol);
    out << (is_zeta ? "zeta(" : "xi(") << format_double(f.d) << ") = " << format_double(v.value) << "\n";
    out << "tail_bound = " << format_double(v.tail_bound) << "\n";
    out << "terms_used = " << v.terms_used << "\n";
    return kExitOk;
}

GainVector synthesize(const Session& s, const std::string& mode) {
    const std::size_t N = s.cfg.N;
    if (mode == "mirror" || mode == "mirror_via_pi") return gain_mirror(s.ens, N, s.cfg.M);
    if (mode == "finite" || mode == "finite_ackermann") {
        return ackermann_finite(std::span(s.ens.a).first(N), std::span(s.ens.b).first(N),
                                std::span(s.targets.values).first(N));
    }
    if (mode == "infinite" || mode == "truncated_infinite") return gain_infinite(s.ens, s.targets, N, s.cfg.M);
    throw ConfigError("unknown synth mode '" + mode + "' (mirror, finite, infinite)");
}

int cmd_synth(const Flags& f, std::ostream& out, std::ostream& err) {
    Session s = open_session(f, out, err);
    require_valid(s);
    const std::string mode = f.mode.empty() ? s.cfg.synth_mode : f.mode;
    const GainVector g = synthesize(s, mode);
    const bool mirror = g.mode == GainMode::mirror_via_pi;
    emit_json(s, gains_json(g, mirror ? "mirror" : to_string(s.cfg.targets.mode)), "gains.json");
    write_meta(s.cfg.output_dir, "synth", f.config_path);
    out << "synth " << to_string(g.mode) << ": N=" << g.N << " M=" << g.M << ", " << g.diverged.size()
        << " diverged\n";
    if (!g.finite()) {
        err << (s.cfg.strict ? "error" : "warning") << ": gain diverged at " << g.diverged.size()
            << " entries (first n=" << g.diverged.front().n << ")\n";
        if (s.cfg.strict) return kExitNumeric;
    }
    return kExitOk;
}

Json decay_json(const DecayClassReport& d) {
    Json j;
    j["d"] = d.d_tested;
    j["direction"] = to_string(d.direction);
    j["first_violation_index"] = d.first_violation_index ? Json(*d.first_violation_index) : Json(nullptr);
    j["zeta_at_d"] = d.zeta_at_d;
    j["verdict"] = to_string(d.verdict);
    j["logratio_ok"] = d.logratio_ok;
    j["max_logratio_slope"] = number_or_null(d.max_logratio_slope);
    j["burn_in"] = d.burn_in;
    j["window"] = d.window;
    return j;
}

Json opt_number(const std::optional<double>& v) { return v ? number_or_null(*v) : Json(nullptr); }

int cmd_feasibility(const Flags& f, std::ostream& out, std::ostream& err) {
    Session s = open_session(f, out, err);
    require_valid(s);
    const FeasibilityReport rep = assess(s.ens, s.targets, s.cfg.N, s.cfg.M, s.cfg.d_grid);

    Json j;
    j["N"] = rep.N;
    j["M"] = rep.M;
    j["targets"] = to_string(s.cfg.targets.mode);
    Json decay = Json::array();
    for (const auto& d : rep.decay) decay.push_back(decay_json(d));
    j["decay"] = decay;
    j["ratio"] = Json{{"sup_a_ratio", number_or_null(rep.ratio.sup_a_ratio)},
                      {"inf_b_ratio", number_or_null(rep.ratio.inf_b_ratio)},
                      {"sup_b_ratio", number_or_null(rep.ratio.sup_b_ratio)},
                      {"nu0", opt_number(rep.ratio.nu0)},
                      {"nu1", opt_number(rep.ratio.nu1)},
                      {"nu2", opt_number(rep.ratio.nu2)},
                      {"pass", rep.ratio.pass}};
    if (rep.phi_decay) {
        const auto& c = *rep.phi_decay;
        j["phi_decay"] = Json{{"C", c.C},
                              {"mu", c.mu},
                              {"kappa", c.kappa},
                              {"max_violation", c.max_violation},
                              {"max_row_sum", c.max_row_sum},
                              {"max_col_sum", c.max_col_sum},
                              {"pass", c.pass}};
    } else {
        j["phi_decay"] = nullptr;
    }
    if (rep.pi_bound) {
        j["pi_bound"] = Json{{"bound", rep.pi_bound->bound},
                             {"max_log_pi", number_or_null(rep.pi_bound->max_log_pi)},
                             {"pass", rep.pi_bound->pass}};
    } else {
        j["pi_bound"] = nullptr;
    }
    j["targets_in_hypotheses"] = rep.targets_in_hypotheses;
    const std::size_t n_diag = s.cfg.N;
    j["diagnostics"] = Json{{"n", n_diag},
                            {"inner_truncation", s.ens.size()},
                            {"alpha", number_or_null(alpha(s.ens, n_diag, s.ens.size()).value)},
                            {"beta", number_or_null(beta(s.ens, s.targets, n_diag, s.ens.size()).value)}};
    Json concl = Json::array();
    for (const auto& c : rep.conclusions) concl.push_back(c);
    j["conclusions"] = concl;

    emit_json(s, j, "feasibility.json");
    write_meta(s.cfg.output_dir, "feasibility", f.config_path);
    for (const auto& c : rep.conclusions) out << "- " << c << "\n";
    return kExitOk;
}

int cmd_verify(const Flags& f, std::ostream& out, std::ostream& err) {
    Session s = open_session(f, out, err);
    require_valid(s);
    const std::size_t N = s.cfg.N;
    const TruncatedSpectrumReport spec = verify_truncated_spectrum(s.ens, s.targets, N, N);

    Json j;
    j["N"] = N;
    j["targets"] = to_string(s.cfg.targets.mode);
    Json modes = Json::array();
    double max_res = 0.0;
    for (const auto& m : spec.modes) {
        Json e;
        e["n"] = m.n;
        e["eigenvalue"] = complex_json(m.eigenvalue);
        e["placed"] = m.placed;
        e["residual"] = number_or_null(m.residual);
        e["winding"] = m.winding ? winding_json(*m.winding) : Json(nullptr);
        e["ok"] = m.ok;
        modes.push_back(e);
        max_res = std::max(max_res, m.residual);
    }
    j["spectrum"] = Json{{"passed", spec.passed}, {"max_eigvec_residual", max_res}, {"modes", modes}};
    Json fails = Json::array();
    for (const auto& x : spec.failures) fails.push_back(x);
    j["spectrum"]["failures"] = fails;

    bool passed = spec.passed;
    if (s.cfg.targets.mode == TargetMode::mirror) {
        const PiSequence pi = pi_sequence(s.ens, N, N);
        if (pi.diverged.empty()) {
            const CauchyOperator P = build_cauchy(s.ens, pi);
            const GainVector g = gain_mirror(s.ens, N, N);
            const TransformedGenerator tg =
                transformed_generator(std::span(s.ens.a).first(N), std::span(s.ens.b).first(N), g.entries);
            const double diag = diagonalization_residual(P, s.ens, g);
            j["cauchy"] = Json{{"involution_residual", P.involution_residual},
                               {"diagonalization_residual", diag},
                               {"similarity_residual", tg.similarity_residual}};
        } else {
            j["cauchy"] = nullptr;
        }
    } else {
        j["cauchy"] = nullptr;
    }
    j["passed"] = passed;

    emit_json(s, j, "verify.json");
    write_meta(s.cfg.output_dir, "verify", f.config_path);
    out << "verify: " << (passed ? "passed" : "failed") << ", max eigenvector residual " << format_double(max_res)
        << "\n";
    for (const auto& x : spec.failures) err << "  " << x << "\n";
    return passed ? kExitOk : kExitNumeric;
}

std::string profile_name(InitialProfile p) {
    switch (p) {
        case InitialProfile::ones: return "ones";
        case InitialProfile::inverse_b: return "inverse_b";
        case InitialProfile::random: return "random";
        case InitialProfile::basis: return "basis";
    }
    return "?";
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    const std::size_t N = traj.states.front().size();
    os << "t,norm";
    for (std::size_t n = 1; n <= N; ++n) os << ",re_x" << n << ",im_x" << n;
    os << "\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        os << format_double(traj.times[s]) << "," << format_double(traj.norms[s]);
        for (const auto& x : traj.states[s]) os << "," << format_double(x.real()) << "," << format_double(x.imag());
        os << "\n";
    }
    if (!os) throw IoError("failed writing " + path.string());
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
    Session s = open_session(f, out, err);
    require_valid(s);
    const std::size_t N = s.cfg.N;
    const bool mirror = s.cfg.targets.mode == TargetMode::mirror;

    // The mirror loop uses the self-consistent N-mode gain so the modal
    // coordinates decouple exactly.
    const GainVector g = mirror ? gain_mirror(s.ens, N, N) : gain_infinite(s.ens, s.targets, N, s.cfg.M);
    if (!g.finite()) {
        err << "error: gain diverged at " << g.diverged.size() << " entries; nothing to simulate\n";
        return kExitNumeric;
    }
    std::optional<CauchyOperator> P;
    if (mirror) P = build_cauchy(s.ens, pi_sequence(s.ens, N, N));

    std::vector<cplx> x0;
    const auto& sim = s.cfg.simulation;
    switch (sim.initial) {
        case InitialProfile::ones: x0 = ones_profile(N); break;
        case InitialProfile::random: x0 = random_profile(N, sim.seed); break;
        case InitialProfile::basis: x0 = basis_profile(N, sim.basis_index); break;
        case InitialProfile::inverse_b:
            if (!P) throw ConfigError("simulation.initial = inverse_b needs mirror targets");
            x0 = inverse_b_modal_profile(s.ens, *P);
            break;
    }

    TrajectoryConfig tc = sim.trajectory;
    if (sim.dt_auto)
        tc.dt = max_stable_step(std::span(s.ens.a).first(N), std::span(s.ens.b).first(N), g.entries);
    const Trajectory traj = integrate_rk4(s.ens, g, x0, tc);
    const StabilityReport rep = stability_report(traj, s.ens, tc, P ? &*P : nullptr);

    Json j;
    j["space"] = to_string(tc.space);
    j["method"] = to_string(traj.method);
    j["gain_mode"] = to_string(g.mode);
    j["N"] = N;
    j["gain_M"] = g.M;
    j["t_end"] = tc.t_end;
    j["dt"] = tc.dt;
    j["records"] = traj.times.size();
    j["initial"] = profile_name(sim.initial);
    j["sup_ratio"] = number_or_null(rep.sup_ratio);
    j["final_ratio"] = number_or_null(rep.final_ratio);
    j["classification"] = to_string(rep.classification);
    j["epsilon"] = tc.epsilon;
    Json fp = Json::array();
    for (std::size_t n = 0; n < rep.first_passage.size(); ++n) {
        Json e;
        e["n"] = n + 1;
        e["predicted"] = rep.predicted_first_passage[n];
        e["empirical"] = opt_number(rep.first_passage[n]);
        e["relative_error"] =
            rep.first_passage[n]
                ? number_or_null(std::abs(*rep.first_passage[n] / rep.predicted_first_passage[n] - 1.0))
                : Json(nullptr);
        fp.push_back(e);
    }
    j["first_passage"] = fp;
    j["max_mode_ratio_final"] = opt_number(rep.max_mode_ratio_final);

    emit_json(s, j, "stability.json");
    if (s.cfg.write_csv) write_trajectory_csv(traj, s.cfg.output_dir / "trajectory.csv");
    write_meta(s.cfg.output_dir, "simulate", f.config_path);
    out << "simulate: " << to_string(rep.classification) << ", final_ratio " << format_double(rep.final_ratio)
        << ", sup_ratio " << format_double(rep.sup_ratio) << "\n";
    return kExitOk;
}

int cmd_report(const Flags& f, std::ostream& out) {
    std::filesystem::path dir = f.report_dir;
    if (dir.empty()) {
        if (f.config_path.empty()) throw ConfigError("report needs --dir or a config");
        dir = load(f).output_dir;
    }
    std::filesystem::create_directories(dir);
    const ReportOutcome r = write_report(dir);
    write_meta(dir, "report", f.config_path);
    out << "report: " << r.present.size() << " sections present, " << r.missing.size() << " missing\n";
    for (const auto& m : r.missing) out << "  missing " << m << "\n";
    return kExitOk;
}

template <class Fn>
int guarded(Fn&& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const Json::exception& e) {
        err << "error: bad config value: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pole placement for ensembles of scalar linear systems", "ensplace"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Flags f;

    auto add_config_opts = [&](CLI::App* sub) {
        sub->add_option("config", f.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--set", f.overrides, "Override a config value, e.g. truncation.N=32");
        sub->add_option("--out", f.out_dir, "Output directory (overrides output.directory)");
        sub->add_option("--targets", f.targets, "Target mode: mirror, zero, uniform_shift, explicit");
        sub->add_flag("--strict", f.strict, "Treat gain divergence as an error");
    };

    auto* validate = app.add_subcommand("validate", "Check the necessary conditions on the ensemble");
    add_config_opts(validate);
    auto* zeta_cmd = app.add_subcommand("zeta", "Evaluate the zeta threshold function");
    auto* xi_cmd = app.add_subcommand("xi", "Evaluate the xi threshold function");
    for (auto* sub : {zeta_cmd, xi_cmd}) {
        sub->add_option("d", f.d, "Decay exponent d > 1")->required();
        sub->add_option("--tol", f.tol, "Absolute tolerance")->capture_default_str();
    }
    auto* synth = app.add_subcommand("synth", "Synthesise the feedback gain");
    add_config_opts(synth);
    synth->add_option("--mode", f.mode, "mirror, finite or infinite");
    auto* feas = app.add_subcommand("feasibility", "Decay-class and sufficient-condition checks");
    add_config_opts(feas);
    auto* verify = app.add_subcommand("verify", "Check the placed spectrum of the truncated closed loop");
    add_config_opts(verify);
    auto* simulate = app.add_subcommand("simulate", "Integrate the closed loop and classify stability");
    add_config_opts(simulate);
    auto* report = app.add_subcommand("report", "Summarise the artifacts of earlier commands");
    report->add_option("config", f.config_path, "JSON run configuration (for the output directory)");
    report->add_option("--dir", f.report_dir, "Artifact directory");
    report->add_option("--set", f.overrides, "Override a config value");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    return guarded(
        [&]() -> int {
            if (validate->parsed()) return cmd_validate(f, out, err);
            if (zeta_cmd->parsed()) return cmd_series(f, true, out);
            if (xi_cmd->parsed()) return cmd_series(f, false, out);
            if (synth->parsed()) return cmd_synth(f, out, err);
            if (feas->parsed()) return cmd_feasibility(f, out, err);
            if (verify->parsed()) return cmd_verify(f, out, err);
            if (simulate->parsed()) return cmd_simulate(f, out, err);
            if (report->parsed()) return cmd_report(f, out);
            return kExitInvalid;
        },
        err);
}

}  // namespace ensplace::cli
