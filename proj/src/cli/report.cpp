#include <fstream>
#include <optional>
#include <sstream>

#include "ensplace/cli.hpp"

namespace ensplace::cli {

namespace {

struct Section {
    std::string title;
    std::string artifact;
    std::optional<Json> doc;
    // Filled for present sections.
    std::string hypotheses;
    std::string window;
    std::string verdict;
    Json residuals = Json::object();
};

std::optional<Json> read_artifact(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    try {
        return Json::parse(is);
    } catch (const Json::parse_error&) {
        return std::nullopt;
    }
}

std::string num(const Json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_null()) return "n/a";
    return v.dump();
}

std::string pass_fail(bool ok) { return ok ? "pass" : "fail"; }

void fill_validation(Section& s) {
    const Json& j = *s.doc;
    s.hypotheses = "a_n > 0, strictly decreasing, pairwise distinct; b_n != 0";
    s.window = "[1, " + num(j.at("window")) + "]";
    s.verdict = pass_fail(j.at("passed").get<bool>());
    s.residuals["violations"] = j.at("violations").size();
}

void fill_gains(Section& s) {
    const Json& j = *s.doc;
    s.hypotheses = "gain mode " + j.at("mode").get<std::string>() + ", targets " + j.at("targets").get<std::string>();
    s.window = "[1, " + num(j.at("N")) + "], products to M = " + num(j.at("M"));
    const std::size_t diverged = j.at("diverged").size();
    s.verdict = diverged == 0 ? "finite" : "diverged at " + std::to_string(diverged) + " entries";
    s.residuals["l1_norm"] = j.at("l1_norm");
    double worst_tail = 0.0;
    for (const auto& e : j.at("entries"))
        if (e.at("tail_estimate").is_number()) worst_tail = std::max(worst_tail, e.at("tail_estimate").get<double>());
    s.residuals["max_tail_estimate"] = worst_tail;
}

void fill_feasibility(Section& s) {
    const Json& j = *s.doc;
    s.hypotheses = "ratio conditions nu0 < nu1 < nu2 < 1; Phi decay with C = 1; pi bound; decay classes";
    s.window = "[1, " + num(j.at("N")) + "], products to M = " + num(j.at("M"));
    const bool ratio = j.at("ratio").at("pass").get<bool>();
    const bool phi = j.at("phi_decay").is_object() && j.at("phi_decay").at("pass").get<bool>();
    const bool pib = j.at("pi_bound").is_object() && j.at("pi_bound").at("pass").get<bool>();
    s.verdict = (ratio && phi && pib) ? "sufficient conditions pass" : "sufficient conditions not certified";
    std::string classes;
    for (const auto& d : j.at("decay")) {
        if (!classes.empty()) classes += "; ";
        classes += "d=" + num(d.at("d")) + ": " + d.at("verdict").get<std::string>();
    }
    if (!classes.empty()) s.verdict += " (" + classes + ")";
    if (phi) {
        s.residuals["mu"] = j.at("phi_decay").at("mu");
        s.residuals["kappa"] = j.at("phi_decay").at("kappa");
        s.residuals["phi_max_violation"] = j.at("phi_decay").at("max_violation");
    }
    if (pib) {
        s.residuals["max_log_pi"] = j.at("pi_bound").at("max_log_pi");
        s.residuals["log_pi_bound"] = j.at("pi_bound").at("bound");
    }
}

void fill_verify(Section& s) {
    const Json& j = *s.doc;
    s.hypotheses = "placed eigenvalues have eigenvectors b/(a - lambda); winding counts around each pole";
    s.window = "[1, " + num(j.at("N")) + "]";
    s.verdict = pass_fail(j.at("passed").get<bool>());
    s.residuals["max_eigvec_residual"] = j.at("spectrum").at("max_eigvec_residual");
    if (j.at("cauchy").is_object()) {
        s.residuals["P2_minus_I"] = j.at("cauchy").at("involution_residual");
        s.residuals["PTP_plus_A"] = j.at("cauchy").at("diagonalization_residual");
    }
}

void fill_stability(Section& s) {
    const Json& j = *s.doc;
    s.hypotheses = "closed loop integrated in " + j.at("space").get<std::string>() + " from the " +
                   j.at("initial").get<std::string>() + " profile";
    s.window = "[1, " + num(j.at("N")) + "], t in [0, " + num(j.at("t_end")) + "]";
    s.verdict = j.at("classification").get<std::string>();
    s.residuals["final_ratio"] = j.at("final_ratio");
    s.residuals["sup_ratio"] = j.at("sup_ratio");
    double worst = 0.0;
    bool any = false;
    for (const auto& e : j.at("first_passage")) {
        if (e.at("relative_error").is_number()) {
            worst = std::max(worst, e.at("relative_error").get<double>());
            any = true;
        }
    }
    if (any) s.residuals["first_passage_max_rel_error"] = worst;
    if (j.at("max_mode_ratio_final").is_number()) s.residuals["max_mode_ratio_final"] = j.at("max_mode_ratio_final");
}

}  // namespace

ReportOutcome write_report(const std::filesystem::path& dir) {
    std::vector<Section> sections{
        {"Necessary conditions", "validation.json", {}, {}, {}, {}, Json::object()},
        {"Gain synthesis", "gains.json", {}, {}, {}, {}, Json::object()},
        {"Sufficient conditions", "feasibility.json", {}, {}, {}, {}, Json::object()},
        {"Spectral verification", "verify.json", {}, {}, {}, {}, Json::object()},
        {"Simulation", "stability.json", {}, {}, {}, {}, Json::object()},
    };
    using Filler = void (*)(Section&);
    const Filler fillers[] = {fill_validation, fill_gains, fill_feasibility, fill_verify, fill_stability};

    ReportOutcome outcome;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        Section& s = sections[i];
        s.doc = read_artifact(dir / s.artifact);
        if (s.doc) {
            try {
                fillers[i](s);
                outcome.present.push_back(s.artifact);
                continue;
            } catch (const Json::exception&) {
                s.doc.reset();
            }
        }
        outcome.missing.push_back(s.artifact);
    }

    std::ostringstream md;
    md << "# Ensemble pole placement report\n";
    Json summary;
    Json list = Json::array();
    for (const auto& s : sections) {
        md << "\n## " << s.title << "\n\n";
        Json entry;
        entry["section"] = s.title;
        entry["artifact"] = s.artifact;
        if (!s.doc) {
            md << "Missing: `" << s.artifact << "` not found or unreadable.\n";
            entry["status"] = "missing";
            list.push_back(entry);
            continue;
        }
        md << "| item | value |\n|---|---|\n";
        md << "| hypotheses checked | " << s.hypotheses << " |\n";
        md << "| window | " << s.window << " |\n";
        md << "| verdict | " << s.verdict << " |\n";
        for (const auto& [k, v] : s.residuals.items()) md << "| " << k << " | " << num(v) << " |\n";
        entry["status"] = "present";
        entry["hypotheses"] = s.hypotheses;
        entry["window"] = s.window;
        entry["verdict"] = s.verdict;
        entry["residuals"] = s.residuals;
        list.push_back(entry);
    }
    if (sections[2].doc && sections[2].doc->contains("conclusions")) {
        md << "\n## Conclusions on the window\n\n";
        for (const auto& c : sections[2].doc->at("conclusions")) md << "- " << c.get<std::string>() << "\n";
    }
    summary["sections"] = list;
    Json missing = Json::array();
    for (const auto& m : outcome.missing) missing.push_back(m);
    summary["missing"] = missing;

    {
        std::ofstream os(dir / "report.md", std::ios::binary);
        if (!os) throw IoError("cannot write report.md in " + dir.string());
        os << md.str();
    }
    write_json_file(summary, dir / "summary.json");
    return outcome;
}

}  // namespace ensplace::cli
