#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ensplace/cli.hpp"

namespace fs = std::filesystem;
using ensplace::Json;

namespace {

const fs::path kConfigs = ENSPLACE_CONFIG_DIR;

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Result r;
    r.code = ensplace::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ensplace_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Json read_json(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    return Json::parse(is);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string demo() { return (kConfigs / "geometric_demo.json").string(); }

}  // namespace

TEST_CASE("validate on the geometric demo") {
    const auto dir = fresh_dir("validate");
    const auto r = cli({"validate", demo(), "--out", dir.string()});
    CHECK(r.code == 0);
    const auto j = read_json(dir / "validation.json");
    CHECK(j.at("passed").get<bool>());
    CHECK(j.at("violations").empty());
    CHECK(j.at("window").get<int>() == 512);
    CHECK(fs::exists(dir / "meta.json"));
}

TEST_CASE("validate reports violations with exit 2") {
    const auto dir = fresh_dir("validate_bad");
    const auto r = cli({"validate", demo(), "--out", dir.string(), "--set", "truncation.N=3", "--set",
                        "truncation.M=3", "--set", R"(ensemble.a={"family":"explicit","values":[0.5,0.25,0.25]})"});
    CHECK(r.code == 2);
    const auto j = read_json(dir / "validation.json");
    CHECK_FALSE(j.at("passed").get<bool>());
    REQUIRE(j.at("violations").size() >= 1);
    CHECK(j.at("violations")[0].at("index").get<int>() == 3);
    // Model commands refuse the same ensemble.
    CHECK(cli({"synth", demo(), "--out", dir.string(), "--set", "truncation.N=3", "--set", "truncation.M=3", "--set",
               R"(ensemble.a={"family":"explicit","values":[0.5,0.25,0.25]})"})
              .code == 2);
}

TEST_CASE("synth mirror gain") {
    const auto dir = fresh_dir("synth");
    const auto r = cli({"synth", demo(), "--out", dir.string()});
    CHECK(r.code == 0);
    const auto j = read_json(dir / "gains.json");
    CHECK(j.at("mode").get<std::string>() == "mirror_via_pi");
    CHECK(j.at("entries").size() == 16);
    CHECK(j.at("diverged").empty());
    CHECK(j.at("l1_norm").is_number());
    // First entry: k_1 = -a_1 pi_1 / b_1 with a positive pi_1.
    CHECK(j.at("entries")[0].at("re").get<double>() < 0.0);
    CHECK(j.at("entries")[0].at("n").get<int>() == 1);
}

TEST_CASE("divergent gain is data by default and an error when strict") {
    const auto cfg = (kConfigs / "power_divergent.json").string();
    const auto dir = fresh_dir("diverge");
    const auto loose = cli({"synth", cfg, "--targets", "zero", "--out", dir.string()});
    CHECK(loose.code == 0);
    CHECK(loose.err.find("warning") != std::string::npos);
    const auto strict = cli({"synth", cfg, "--targets", "zero", "--strict", "--out", dir.string()});
    CHECK(strict.code == 1);
    const auto j = read_json(dir / "gains.json");
    CHECK_FALSE(j.at("diverged").empty());
    CHECK(j.at("l1_norm").is_null());
    const auto& d = j.at("divergence_detail")[0];
    CHECK(d.at("log_magnitude").get<double>() > 700.0);
}

TEST_CASE("feasibility on the geometric demo") {
    const auto dir = fresh_dir("feas");
    CHECK(cli({"feasibility", demo(), "--out", dir.string(), "--set", "truncation.N=32"}).code == 0);
    const auto j = read_json(dir / "feasibility.json");
    CHECK(j.at("ratio").at("pass").get<bool>());
    CHECK(j.at("phi_decay").at("pass").get<bool>());
    CHECK(j.at("pi_bound").at("pass").get<bool>());
    CHECK(j.at("N").get<int>() == 32);
}

TEST_CASE("verify and simulate on the geometric demo") {
    const auto dir = fresh_dir("verify");
    CHECK(cli({"verify", demo(), "--out", dir.string()}).code == 0);
    const auto v = read_json(dir / "verify.json");
    CHECK(v.at("passed").get<bool>());
    CHECK(v.at("spectrum").at("max_eigvec_residual").get<double>() <= 1e-8);
    CHECK(v.at("cauchy").at("involution_residual").get<double>() <= 1e-8);

    CHECK(cli({"simulate", demo(), "--out", dir.string(), "--set", "simulation.t_end=2"}).code == 0);
    const auto s = read_json(dir / "stability.json");
    CHECK(s.at("classification").is_string());
    std::ifstream csv(dir / "trajectory.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("t,norm,re_x1,im_x1,re_x2,im_x2", 0) == 0);
    CHECK(header.find("re_x16,im_x16") != std::string::npos);
    CHECK(header.find("x17") == std::string::npos);
    std::string row;
    std::getline(csv, row);
    CHECK(row.rfind("0,", 0) == 0);
}

TEST_CASE("simulate rejects a step above the ceiling") {
    const auto dir = fresh_dir("dt");
    CHECK(cli({"simulate", demo(), "--out", dir.string(), "--set", "simulation.dt=0.5"}).code == 2);
}

TEST_CASE("zeta and xi commands") {
    auto r = cli({"zeta", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("zeta(2) = ") == 0);
    r = cli({"xi", "2", "--tol", "1e-9"});
    CHECK(r.code == 0);
    CHECK(r.out.find("3.14159265") != std::string::npos);
    CHECK(cli({"zeta", "0.5"}).code == 2);
}

TEST_CASE("command-line and config errors") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"validate", "/nonexistent/config.json"}).code == 2);
    CHECK(cli({"--version"}).code == 0);
    CHECK(cli({"--help"}).code == 0);
    const auto dir = fresh_dir("errors");
    CHECK(cli({"validate", demo(), "--out", dir.string(), "--set", "truncation.M=8"}).code == 2);
    CHECK(cli({"validate", demo(), "--out", dir.string(), "--set", "bogus=1"}).code == 2);
    CHECK(cli({"validate", demo(), "--out", dir.string(), "--set", "simulation.epsilon=1.5"}).code == 2);
    CHECK(cli({"synth", demo(), "--out", dir.string(), "--mode", "sideways"}).code == 2);

    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(cli({"validate", bad.string()}).code == 2);
}

TEST_CASE("config overrides") {
    Json doc = ensplace::cli::load_config_document(demo());
    ensplace::cli::apply_override(doc, "truncation.N=8");
    ensplace::cli::apply_override(doc, "ensemble.space=linf");
    ensplace::cli::apply_override(doc, "simulation.seed=42");
    const auto cfg = ensplace::cli::parse_config(doc);
    CHECK(cfg.N == 8);
    CHECK(cfg.M == 512);
    CHECK(cfg.ensemble.N == 512);
    CHECK(cfg.ensemble.space == ensplace::SpaceTag::l_infinity());
    CHECK(cfg.simulation.seed == 42);
    CHECK_THROWS_AS(ensplace::cli::apply_override(doc, "=3"), ensplace::cli::ConfigError);
    CHECK_THROWS_AS(ensplace::cli::apply_override(doc, "truncation.N.x=3"), ensplace::cli::ConfigError);
}

TEST_CASE("report with missing artifacts") {
    const auto empty = fresh_dir("report_empty");
    auto r = cli({"report", "--dir", empty.string()});
    CHECK(r.code == 0);
    auto summary = read_json(empty / "summary.json");
    CHECK(summary.at("missing").size() == 5);
    CHECK(fs::exists(empty / "report.md"));

    const auto partial = fresh_dir("report_partial");
    CHECK(cli({"verify", demo(), "--out", partial.string()}).code == 0);
    r = cli({"report", "--dir", partial.string()});
    CHECK(r.code == 0);
    summary = read_json(partial / "summary.json");
    CHECK(summary.at("missing").size() == 4);
    const std::string md = slurp(partial / "report.md");
    CHECK(md.find("## Spectral verification") != std::string::npos);
    CHECK(md.find("P2_minus_I") != std::string::npos);
    CHECK(md.find("Missing: `stability.json`") != std::string::npos);
}

TEST_CASE("full pipeline is byte-for-byte reproducible") {
    const std::vector<std::string> commands{"validate", "synth", "feasibility", "verify", "simulate"};
    std::vector<fs::path> dirs{fresh_dir("repeat_a"), fresh_dir("repeat_b")};
    for (const auto& dir : dirs) {
        for (const auto& c : commands) REQUIRE(cli({c, demo(), "--out", dir.string()}).code == 0);
        REQUIRE(cli({"report", "--dir", dir.string()}).code == 0);
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const auto name = entry.path().filename();
        if (name == "meta.json") continue;
        CAPTURE(name.string());
        CHECK(slurp(entry.path()) == slurp(dirs[1] / name));
        ++compared;
    }
    CHECK(compared == 8);
}
